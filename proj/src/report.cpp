#include "penreg/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "penreg/config.hpp"
#include "penreg/error.hpp"

namespace penreg {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = line.find(',');
        out.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return out;
}

double parse_field(std::string_view text, int line_no)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidInput(fmt::format("records line {}: '{}' is not a number", line_no, text));
    }
    return value;
}

int penalty_rank(const std::string& name)
{
    for (PenaltyMode mode : {PenaltyMode::l1, PenaltyMode::scad_auto, PenaltyMode::scad_fixed}) {
        if (penalty_mode_name(mode) == name) return static_cast<int>(mode);
    }
    return 99;
}

int selector_rank(const std::string& name)
{
    for (SelectorId id : all_selectors) {
        if (selector_name(id) == name) return static_cast<int>(id);
    }
    return name == oracle_name ? 100 : 50;
}

/// Selector names present in the rows, canonical order, oracle last.
std::vector<std::string> selector_order(const std::vector<RecordRow>& rows)
{
    std::vector<std::string> names;
    for (const auto& row : rows) {
        if (std::find(names.begin(), names.end(), row.selector) == names.end()) names.push_back(row.selector);
    }
    std::stable_sort(names.begin(), names.end(),
                     [](const auto& a, const auto& b) { return selector_rank(a) < selector_rank(b); });
    return names;
}

std::string aligned(const std::vector<std::vector<std::string>>& cells)
{
    std::vector<std::size_t> width;
    for (const auto& row : cells) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
    }
    std::string out;
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j == 0) {
                line += fmt::format("{:<{}}", row[j], width[j]);
            } else {
                line += fmt::format("  {:>{}}", row[j], width[j]);
            }
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
    }
    return out;
}

}  // namespace

std::string records_csv(const std::vector<RecordRow>& rows)
{
    std::string out(records_header);
    out += '\n';
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", r.rep, r.selector, format_number(r.lambda), r.df,
                           format_number(r.loss), format_number(r.efficiency), r.flag);
    }
    return out;
}

std::vector<RecordRow> parse_records(std::string_view text)
{
    std::vector<RecordRow> rows;
    int line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != records_header) {
                throw InvalidInput(fmt::format("records header must be '{}'", records_header));
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 7) {
            throw InvalidInput(fmt::format("records line {}: expected 7 fields, found {}", line_no, fields.size()));
        }
        RecordRow row;
        row.rep = static_cast<int>(parse_field(fields[0], line_no));
        row.selector = std::string(fields[1]);
        row.lambda = parse_field(fields[2], line_no);
        row.df = static_cast<int>(parse_field(fields[3], line_no));
        row.loss = parse_field(fields[4], line_no);
        row.efficiency = parse_field(fields[5], line_no);
        row.flag = std::string(fields[6]);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidInput("records file contains no records");
    return rows;
}

ReportTables build_report(std::vector<ScenarioRecords> scenarios)
{
    if (scenarios.empty()) throw InvalidInput("no records to report");
    std::stable_sort(scenarios.begin(), scenarios.end(), [](const auto& a, const auto& b) {
        const auto ka = std::make_tuple(a.key.design, penalty_rank(a.key.penalty), a.key.n, a.key.c);
        const auto kb = std::make_tuple(b.key.design, penalty_rank(b.key.penalty), b.key.n, b.key.c);
        return ka < kb;
    });

    ReportTables t;
    t.summary_csv = "selector,n,c,penalty,median_efficiency,failures\n";
    t.df_quantiles_csv = "selector,n,c,penalty,min,q1,median,q3,max\n";
    t.oracle_csv = "design,n,c,penalty,median_min_loss,failed_realizations,reps\n";

    // Wide layout for the text table: one block per (design, penalty),
    // rows selector x n, columns c.
    struct Block
    {
        std::vector<double> cs;
        std::map<std::pair<int, Index>, std::map<double, std::string>> cells;
        std::map<int, std::string> names;
    };
    std::vector<std::pair<std::string, Block>> blocks;

    for (const auto& sc : scenarios) {
        const ScenarioSummary summary = summarize_rows(sc.rows);
        const std::string c = format_number(sc.key.c);
        const std::string block_name = fmt::format("design={} penalty={}", sc.key.design, sc.key.penalty);
        if (blocks.empty() || blocks.back().first != block_name) blocks.emplace_back(block_name, Block{});
        Block& block = blocks.back().second;
        if (std::find(block.cs.begin(), block.cs.end(), sc.key.c) == block.cs.end()) block.cs.push_back(sc.key.c);

        for (const auto& name : selector_order(sc.rows)) {
            const SelectorSummary& s = summary.get(name);
            t.df_quantiles_csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", name, sc.key.n, c, sc.key.penalty,
                                              format_number(s.df.min), format_number(s.df.q1),
                                              format_number(s.df.median), format_number(s.df.q3),
                                              format_number(s.df.max));
            if (name == oracle_name) {
                t.oracle_csv += fmt::format("{},{},{},{},{},{},{}\n", sc.key.design, sc.key.n, c, sc.key.penalty,
                                            format_number(s.median_loss), summary.failed_realizations, sc.reps);
                continue;
            }
            t.summary_csv += fmt::format("{},{},{},{},{},{}\n", name, sc.key.n, c, sc.key.penalty,
                                         format_number(s.median_efficiency), s.failures);
            const int rank = selector_rank(name);
            block.names[rank] = name;
            block.cells[{rank, sc.key.n}][sc.key.c] = format_number(s.median_efficiency);
        }
    }

    for (auto& [name, block] : blocks) {
        std::sort(block.cs.begin(), block.cs.end());
        std::vector<std::vector<std::string>> cells;
        std::vector<std::string> header{"selector", "n"};
        for (double c : block.cs) header.push_back(fmt::format("c={}", format_number(c)));
        cells.push_back(std::move(header));
        for (const auto& [key, by_c] : block.cells) {
            std::vector<std::string> row{block.names[key.first], std::to_string(key.second)};
            for (double c : block.cs) {
                const auto it = by_c.find(c);
                row.push_back(it == by_c.end() ? "-" : it->second);
            }
            cells.push_back(std::move(row));
        }
        if (!t.summary_table.empty()) t.summary_table += '\n';
        t.summary_table += fmt::format("Median loss efficiency, {}\n", name);
        t.summary_table += aligned(cells);
    }
    return t;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput(fmt::format("cannot open '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, std::string_view body)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
        out.flush();
        if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
    }
    fs::rename(tmp, path);
}

void write_report(const fs::path& dir, const ReportTables& tables)
{
    write_file(dir / "summary.csv", tables.summary_csv);
    write_file(dir / "summary_table.txt", tables.summary_table);
    write_file(dir / "df_quantiles.csv", tables.df_quantiles_csv);
    write_file(dir / "oracle.csv", tables.oracle_csv);
}

ScenarioRecords load_scenario_records(const fs::path& records_path)
{
    ScenarioRecords sc;
    sc.rows = parse_records(read_file(records_path));
    const fs::path manifest = records_path.parent_path() / "manifest.txt";
    if (fs::exists(manifest)) {
        const RunConfig config = parse_config(read_file(manifest));
        if (config.n_values.size() != 1 || config.c_values.size() != 1 || config.penalties.size() != 1) {
            throw InvalidInput(fmt::format("'{}' does not describe a single scenario", manifest.string()));
        }
        sc.key = {std::string(design_name(config.design)), config.n_values[0], config.c_values[0],
                  std::string(penalty_mode_name(config.penalties[0]))};
        sc.reps = config.reps;
    } else {
        sc.key.c = std::numeric_limits<double>::quiet_NaN();
        int max_rep = -1;
        for (const auto& row : sc.rows) max_rep = std::max(max_rep, row.rep);
        sc.reps = max_rep + 1;
    }
    return sc;
}

std::vector<ScenarioRecords> load_records_tree(const fs::path& path)
{
    if (!fs::exists(path)) throw InvalidInput(fmt::format("'{}' does not exist", path.string()));
    std::vector<ScenarioRecords> out;
    if (fs::is_regular_file(path)) {
        out.push_back(load_scenario_records(path));
        return out;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().filename() == "records.csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InvalidInput(fmt::format("no records.csv under '{}'", path.string()));
    for (const auto& f : files) out.push_back(load_scenario_records(f));
    return out;
}

}  // namespace penreg
