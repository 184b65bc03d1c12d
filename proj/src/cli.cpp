#include "penreg/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "penreg/error.hpp"
#include "penreg/linear_solver.hpp"
#include "penreg/report.hpp"

namespace penreg {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view penreg_version = "0.1.0";

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s)
{
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::string versions_block()
{
    return fmt::format("info.version = {}\ninfo.eigen = {}.{}.{}\ninfo.fmt = {}\n", penreg_version,
                       EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION, FMT_VERSION);
}

std::string scenario_dir_name(const Scenario& s)
{
    return fmt::format("{}_{}_n{}_c{}", design_name(s.design), penalty_mode_name(s.penalty), s.n,
                       exact_number(s.c));
}

RunConfig single_scenario_config(const RunConfig& config, const Scenario& s)
{
    RunConfig one = config;
    one.n_values = {s.n};
    one.c_values = {s.c};
    one.penalties = {s.penalty};
    return one;
}

std::string run_info(const ScenarioRun& run, std::string_view prefix)
{
    double lmax_lo = std::numeric_limits<double>::infinity(), lmax_hi = -lmax_lo;
    double lmin_lo = lmax_lo, lmin_hi = -lmax_lo;
    std::size_t violations = 0;
    for (const auto& r : run.records) {
        violations += r.monotonicity_violations;
        if (r.failed) continue;
        lmax_lo = std::min(lmax_lo, r.lambda_max);
        lmax_hi = std::max(lmax_hi, r.lambda_max);
        lmin_lo = std::min(lmin_lo, r.lambda_min);
        lmin_hi = std::max(lmin_hi, r.lambda_min);
    }
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) {
        out += fmt::format("info.{}{} = {}\n", prefix, key, value);
    };
    line("base_seed", std::to_string(run.scenario.base_seed));
    line("d_n", std::to_string(run.dimension));
    line("candidate_columns", std::to_string(run.candidate_columns));
    line("scad_a", run.scad_a ? exact_number(*run.scad_a) : std::string("none"));
    line("lambda_max_range", fmt::format("{},{}", format_number(lmax_lo), format_number(lmax_hi)));
    line("lambda_min_range", fmt::format("{},{}", format_number(lmin_lo), format_number(lmin_hi)));
    line("failed_realizations", std::to_string(run.summary.failed_realizations));
    line("monotonicity_violations", std::to_string(violations));
    return out;
}

}  // namespace

Index CsvTable::column(const std::string& name) const
{
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return static_cast<Index>(j);
    }
    throw InvalidInput(fmt::format("column '{}' not found in data", name));
}

CsvTable parse_numeric_csv(std::string_view text)
{
    CsvTable table;
    std::vector<std::vector<double>> rows;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        if (trim(line).empty()) continue;

        std::vector<std::string_view> fields;
        while (true) {
            const auto comma = line.find(',');
            fields.push_back(trim(line.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (table.header.empty()) {
            for (auto f : fields) table.header.push_back(unquote(f));
            for (std::size_t j = 0; j < table.header.size(); ++j) {
                for (std::size_t k = 0; k < j; ++k) {
                    if (table.header[j] == table.header[k]) {
                        throw InvalidInput(fmt::format("duplicate column name '{}'", table.header[j]));
                    }
                }
            }
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw InvalidInput(fmt::format("line {}: expected {} cells, found {}", line_no, table.header.size(),
                                           fields.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string_view cell = fields[j];
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row[j]);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(row[j])) {
                throw InvalidInput(fmt::format("line {}, column '{}': '{}' is not a finite number", line_no,
                                               table.header[j], cell));
            }
        }
        rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw InvalidInput("data file is empty");
    if (rows.empty()) throw InvalidInput("data file has a header but no rows");
    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return table;
}

CsvTable read_numeric_csv(const fs::path& path)
{
    return parse_numeric_csv(read_file(path));
}

PenaltyAnalysis analyze_penalty(const DesignMatrix& input, const VectorXd& y, PenaltyMode mode,
                                const std::vector<SelectorId>& selectors, std::uint64_t seed, int folds,
                                int grid_size)
{
    const DesignMatrix design = ensure_standardized(input);
    const Index n = design.rows();
    const Index d = design.cols();
    PenaltyAnalysis out;
    out.mode = mode;

    PenaltyKind kind = PenaltyKind::l1();
    PathOptions options;
    if (mode == PenaltyMode::scad_auto) {
        out.scad_a = convex_scad_a(gram_min_eigenvalue(design));
        kind = PenaltyKind::scad(*out.scad_a);
    } else if (mode == PenaltyMode::scad_fixed) {
        out.scad_a = default_scad_a;
        kind = PenaltyKind::scad(default_scad_a);
        options.allow_nonconvex = true;
    }

    const VectorXd lambdas = lambda_grid(design, y, static_cast<std::size_t>(grid_size), 1e-4);
    out.lambda_max = lambdas(0);
    out.lambda_min = lambdas(lambdas.size() - 1);
    const PathFit fit = fit_path(design, y, kind, lambdas, options);

    std::optional<double> s2_full;
    if (n > d + 1) s2_full = sigma_tilde(design, y);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto push = [&](std::string name, const std::optional<SelectorScore>& score, std::string_view fail_flag) {
        SelectionRow row;
        row.selector = std::move(name);
        if (!score) {
            row.flag = std::string(fail_flag);
            row.lambda = nan;
            row.df = -1;
            row.coefficients = VectorXd::Constant(d + 1, nan);
        } else {
            const auto g = static_cast<Index>(score->selected_index);
            row.lambda = lambdas(g);
            row.df = fit.df[score->selected_index];
            row.coefficients = fit.coefficients.row(g).transpose();
        }
        out.rows.push_back(std::move(row));
    };

    for (SelectorId id : selectors) {
        if (id == SelectorId::cv10) {
            for (int run = 0; run < 2; ++run) {
                CvOptions cv;
                cv.folds = folds;
                cv.seed = seed + static_cast<std::uint64_t>(run);
                cv.gaussian = options;
                std::optional<SelectorScore> score;
                try {
                    score = kfold_cv(design, y, kind, lambdas, std::nullopt, cv, fit.df);
                } catch (const InvalidInput&) {
                }
                push(fmt::format("cv10_run{}", run + 1), score, flag_no_admissible);
            }
            continue;
        }
        if (id == SelectorId::cp && !s2_full) {
            push("cp", std::nullopt, flag_unavailable);
            continue;
        }
        std::optional<SelectorScore> score;
        try {
            score = score_gaussian_path(fit, id, static_cast<int>(n), s2_full);
        } catch (const InvalidInput&) {
        }
        push(std::string(selector_name(id)), score, flag_no_admissible);
    }
    return out;
}

void cmd_simulate(const RunConfig& config, std::ostream& log)
{
    const std::vector<Scenario> scenarios = config.scenarios();
    for (const auto& s : scenarios) s.validate();

    const fs::path root(config.output_dir);
    std::string manifest = serialize_config(config) + versions_block();
    std::vector<ScenarioRecords> collected;
    for (const auto& s : scenarios) {
        const auto start = std::chrono::steady_clock::now();
        const ScenarioRun run = run_scenario(s, config.workers);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const std::string name = scenario_dir_name(s);
        const fs::path dir = root / "scenarios" / name;
        const std::string records = records_csv(run.rows());
        write_file(dir / "records.csv", records);
        write_file(dir / "manifest.txt", serialize_config(single_scenario_config(config, s)) + run_info(run, ""));
        manifest += run_info(run, name + ".");

        // Summaries come from the rows as written so that `report` reproduces
        // them exactly.
        ScenarioRecords sc;
        sc.key = {std::string(design_name(s.design)), s.n, s.c, std::string(penalty_mode_name(s.penalty))};
        sc.reps = s.reps;
        sc.rows = parse_records(records);
        collected.push_back(std::move(sc));

        log << fmt::format("{}: d_n={} reps={} failed={} ({:.1f}s)\n", name, run.dimension, s.reps,
                           run.summary.failed_realizations, seconds);
    }
    const ReportTables tables = build_report(std::move(collected));
    write_report(root, tables);
    write_file(root / "run_manifest.txt", manifest);
    log << tables.summary_table;
}

void cmd_fit(const RunConfig& config, std::ostream& log)
{
    if (config.data_path.empty()) throw InvalidInput("fit needs --data");
    if (config.target.empty()) throw InvalidInput("fit needs --target");
    const CsvTable table = read_numeric_csv(config.data_path);
    const Index target = table.column(config.target);
    if (table.header.size() < 2) throw InvalidInput("data needs at least one predictor besides the target");

    const Index n = table.values.rows();
    const Index d = table.values.cols() - 1;
    MatrixXd x(n, d);
    std::vector<std::string> names;
    for (Index j = 0, k = 0; j < table.values.cols(); ++j) {
        if (j == target) continue;
        x.col(k++) = table.values.col(j);
        names.push_back(table.header[static_cast<std::size_t>(j)]);
    }
    const VectorXd y = table.values.col(target);
    const bool wants_cv =
        std::find(config.selectors.begin(), config.selectors.end(), SelectorId::cv10) != config.selectors.end();
    if (wants_cv && n < config.cv_folds) {
        throw InvalidInput(fmt::format("{}-fold cv needs at least {} rows, data has {}", config.cv_folds,
                                       config.cv_folds, n));
    }
    const DesignMatrix design = standardize(DesignMatrix(std::move(x), true, names));

    const fs::path root(config.output_dir);
    std::string manifest = serialize_config(config) + versions_block();
    manifest += fmt::format("info.rows = {}\ninfo.predictors = {}\n", n, d);
    manifest += fmt::format("info.cv_seeds = {},{}\n", config.seed, config.seed + 1);

    for (PenaltyMode mode : config.penalties) {
        const PenaltyAnalysis a =
            analyze_penalty(design, y, mode, config.selectors, config.seed, config.cv_folds, config.grid_size);
        const std::string pname(penalty_mode_name(mode));

        std::string grid = "selector";
        std::string coefs = "selector,flag,lambda,df,intercept";
        for (const auto& name : names) {
            grid += ',' + name;
            coefs += ',' + name;
        }
        grid += '\n';
        coefs += '\n';
        std::vector<std::vector<std::string>> cells;
        std::vector<std::string> head{"selector"};
        head.insert(head.end(), names.begin(), names.end());
        cells.push_back(head);
        for (const auto& row : a.rows) {
            grid += row.selector;
            std::vector<std::string> text_row{row.selector};
            for (Index j = 0; j < d; ++j) {
                const bool selected = row.flag == flag_ok && row.coefficients(j + 1) != 0.0;
                grid += selected ? ",X" : ",";
                text_row.push_back(selected ? "X" : (row.flag == flag_ok ? "." : "?"));
            }
            grid += '\n';
            cells.push_back(std::move(text_row));

            coefs += fmt::format("{},{},{},{}", row.selector, row.flag, format_number(row.lambda), row.df);
            for (Index j = 0; j <= d; ++j) coefs += ',' + format_number(row.coefficients(j));
            coefs += '\n';
        }
        write_file(root / fmt::format("selection_grid_{}.csv", pname), grid);
        write_file(root / fmt::format("coefficients_{}.csv", pname), coefs);

        manifest += fmt::format("info.{}.scad_a = {}\n", pname, a.scad_a ? exact_number(*a.scad_a) : "none");
        manifest += fmt::format("info.{}.lambda_max = {}\ninfo.{}.lambda_min = {}\n", pname,
                                format_number(a.lambda_max), pname, format_number(a.lambda_min));

        log << fmt::format("Selected variables, penalty={} (X selected, . not selected, ? unavailable)\n", pname);
        std::size_t width0 = 0;
        for (const auto& row : cells) width0 = std::max(width0, row[0].size());
        for (const auto& row : cells) {
            std::string line = fmt::format("{:<{}}", row[0], width0);
            for (std::size_t j = 1; j < row.size(); ++j) {
                line += fmt::format("  {:>{}}", row[j], cells[0][j].size());
            }
            log << line << '\n';
        }
    }
    write_file(root / "fit_manifest.txt", manifest);
}

void cmd_report(const RunConfig& config, std::ostream& log)
{
    if (config.records_path.empty()) throw InvalidInput("report needs --records");
    const ReportTables tables = build_report(load_records_tree(config.records_path));
    write_report(fs::path(config.output_dir), tables);
    log << tables.summary_table;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Penalized regression paths with tuning-parameter selection"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> overrides;
    auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
        return sub->add_option_function<std::string>(
            "--" + name, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
    };

    auto* sim = app.add_subcommand("simulate", "Run Monte Carlo scenarios from a config file");
    sim->add_option("--config", config_path, "Config file (key = value lines)")->required();
    flag(sim, "seed", "seed", "Base seed");
    flag(sim, "workers", "workers", "Worker threads");
    flag(sim, "reps", "reps", "Realizations per scenario");
    flag(sim, "out", "out", "Output directory");

    auto* fit = app.add_subcommand("fit", "Fit penalized paths to a CSV dataset and tabulate selections");
    fit->add_option("--config", config_path, "Optional config file");
    flag(fit, "data", "data", "CSV file with a header row");
    flag(fit, "target", "target", "Response column name");
    flag(fit, "penalty", "penalty", "l1, scad, scad37 (comma separated)");
    flag(fit, "selectors", "selectors", "Selector list, e.g. cv10,aic,aicc,bic,cp,gcv,gamma");
    flag(fit, "seed", "seed", "First CV seed");
    flag(fit, "out", "out", "Output directory");

    auto* rep = app.add_subcommand("report", "Re-aggregate records.csv files");
    rep->add_option("--config", config_path, "Optional config file");
    flag(rep, "records", "records", "records.csv file or directory");
    flag(rep, "out", "out", "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) config = load_config(config_path);
        for (const auto& [key, value] : overrides) apply_setting(config, key, value);
        if (sim->parsed()) {
            config.command = "simulate";
            cmd_simulate(config, out);
        } else if (fit->parsed()) {
            config.command = "fit";
            cmd_fit(config, out);
        } else {
            config.command = "report";
            cmd_report(config, out);
        }
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace penreg
