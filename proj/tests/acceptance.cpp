// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "penreg/cli.hpp"
#include "penreg/error.hpp"
#include "penreg/generators.hpp"
#include "penreg/harness.hpp"
#include "penreg/linear_solver.hpp"
#include "penreg/loss.hpp"
#include "penreg/penalties.hpp"
#include "penreg/report.hpp"
#include "penreg/selectors.hpp"

using namespace penreg;
namespace fs = std::filesystem;

namespace {

constexpr int acceptance_reps = 200;
constexpr std::uint64_t acceptance_seed = 20240601;

// Lower bounds for the projection-bias diagnostics, fixed from the n = 100
// values (371.7 and 4.80) rounded down.
constexpr double exponential_bias_k1 = 300.0;
constexpr double omitted_bias_k1 = 4.0;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds)
{
    if (!pass) ++failures;
    std::cout << fmt::format("criterion {:>2} {}: {}  ({}; {:.1f}s)", id, name, pass ? "PASS" : "FAIL", detail, seconds)
              << std::endl;
}

double since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int worker_count()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Invariant tallies gathered from every scenario run.
struct Tally
{
    long rows = 0;
    long below_one = 0;
    long above_oracle = 0;
    std::size_t sweeps = 0;
    std::size_t violations = 0;

    void add(const ScenarioRun& run)
    {
        for (const RealizationRecord& rec : run.records) {
            sweeps += rec.sweeps;
            violations += rec.monotonicity_violations;
            if (rec.failed) continue;
            const double oracle = rec.rows.back().loss;
            for (const RecordRow& row : rec.rows) {
                if (!row.usable()) continue;
                ++rows;
                if (!(row.efficiency >= 1.0)) ++below_one;
                if (row.loss < oracle) ++above_oracle;
            }
        }
    }

    void add(const std::vector<RecordRow>& rows_in)
    {
        for (const RecordRow& row : rows_in) {
            if (!row.usable()) continue;
            ++rows;
            if (!(row.efficiency >= 1.0)) ++below_one;
        }
    }
};

Tally tally;

ScenarioRun run(DesignKind design, PenaltyMode penalty, Index n, double c, std::vector<SelectorId> selectors)
{
    Scenario s;
    s.design = design;
    s.penalty = penalty;
    s.n = n;
    s.c = c;
    s.sigma2 = 100.0;
    s.reps = acceptance_reps;
    s.base_seed = acceptance_seed;
    s.selectors = std::move(selectors);
    ScenarioRun out = run_scenario(s, worker_count());
    tally.add(out);
    return out;
}

MatrixXd random_matrix(Index n, Index d, std::mt19937_64& rng)
{
    std::normal_distribution<double> z;
    MatrixXd x(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) x(i, j) = z(rng);
    return x;
}

void solver_oracle()
{
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(acceptance_seed);
    std::normal_distribution<double> z;
    double worst = 0.0;
    int compared = 0;
    for (int instance = 0; instance < 50; ++instance) {
        const MatrixXd x = random_matrix(20, 2, rng);
        const DesignMatrix design = standardize(DesignMatrix(x));
        VectorXd y(20);
        for (Index i = 0; i < 20; ++i) y(i) = 1.0 + 1.5 * x(i, 0) - 0.7 * x(i, 1) + z(rng);
        const MatrixXd xs = oracle::standardize_columns(x);
        const double lmax = gaussian_lambda_max(design, y);
        VectorXd lambdas(5);
        lambdas << 0.8 * lmax, 0.5 * lmax, 0.3 * lmax, 0.1 * lmax, 0.02 * lmax;
        const double a = convex_scad_a(gram_min_eigenvalue(design));
        for (const PenaltyKind& kind : {PenaltyKind::l1(), PenaltyKind::scad(a)}) {
            const PathFit fit = fit_path(design, y, kind, lambdas);
            for (Index g = 0; g < lambdas.size(); ++g) {
                const oracle::Objective2d f(xs, y, kind.is_scad() ? kind.a() : 0.0, lambdas(g));
                const auto [b1, b2] = oracle::brute_force_2d(f);
                const double c1 = fit.coefficients(g, 1) * design.column_scales()(0);
                const double c2 = fit.coefficients(g, 2) * design.column_scales()(1);
                worst = std::max({worst, std::abs(c1 - b1), std::abs(c2 - b2)});
                ++compared;
            }
        }
    }
    report(1, "solver matches brute force", worst <= 2e-3 && compared == 500,
           fmt::format("{} fits, max coefficient gap {:.2e}", compared, worst), since(start));
}

void orthonormal_closed_form()
{
    const auto start = std::chrono::steady_clock::now();
    const Index n = 400;
    const Index d = dimension_for(n, 0.5);
    const DesignMatrix design = standardize(trig_design(n, d));
    Rng rng = stream_rng(acceptance_seed, 0);
    const VectorXd y = exponential_mean(n) + gaussian_noise(n, 100.0, rng);
    const VectorXd zc = design.standardized().transpose() * (y.array() - y.mean()).matrix() / static_cast<double>(n);
    const VectorXd grid = lambda_grid(design, y, 200);
    const double a = convex_scad_a(gram_min_eigenvalue(design));

    double worst = 0.0;
    for (const PenaltyKind& kind : {PenaltyKind::l1(), PenaltyKind::scad(a)}) {
        const PathFit fit = fit_path(design, y, kind, grid);
        for (Index g = 0; g < grid.size(); ++g) {
            for (Index j = 0; j < d; ++j) {
                const double expected = kind.is_scad()
                                            ? univariate_update(zc(j), grid(g), kind)
                                            : std::copysign(std::max(std::abs(zc(j)) - grid(g), 0.0), zc(j));
                const double got = fit.coefficients(g, j + 1) * design.column_scales()(j);
                worst = std::max(worst, std::abs(got - expected));
            }
        }
    }
    report(2, "orthonormal closed form", worst <= 1e-6,
           fmt::format("200 grid points, d = {}, SCAD a = {:.4g}, max gap {:.2e}", d, a, worst), since(start));
}

void criterion_arithmetic()
{
    const auto start = std::chrono::steady_clock::now();
    const double inf = std::numeric_limits<double>::infinity();
    const double e = std::exp(1.0);
    struct Case
    {
        double got;
        double expected;
    };
    const Case cases[] = {
        {aic_gauss(1.0, 5, 100), 0.1},
        {aic_gauss(e, 0, 100), 1.0},
        {aicc_gauss(1.0, 5, 100), 12.0 / 93.0},
        {bic_gauss(1.0, 5, 100), 5.0 * std::log(100.0) / 100.0},
        {gcv(1.0, 50, 100), 4.0},
        {cp(2.0, 3, 100, 1.5), 2.09},
        {gamma_n(1.0, 0, 100), 1.0},
        {gamma_n(2.0, 100, 100), 6.0},
        {aic_glm(-50.0, 4, 100), 1.08},
        {aicc_glm(-50.0, 4, 100), 1.0 + 10.0 / 94.0},
        {bic_glm(-50.0, 4, 100), 1.0 + 0.04 * std::log(100.0)},
        {std::log(8.0) * 0.5, bic_gauss(1.0, 4, 8)},
    };
    int bad = 0;
    for (const Case& c : cases) bad += std::abs(c.got - c.expected) > 1e-9;
    bad += aicc_gauss(1.0, 98, 100) != inf;

    int guard_mismatch = 0;
    for (int n = 5; n <= 200; ++n) {
        for (int df = 0; df <= n + 2; ++df) {
            const bool guarded = df >= n - 2;
            guard_mismatch += (aicc_gauss(1.0, df, n) == inf) != guarded;
            guard_mismatch += (aicc_glm(-10.0, df, n) == inf) != guarded;
        }
    }

    VectorXd s1(3), s2(3), s3(2);
    s1 << 3, 1, 2;
    s2 << 1, 1, 2;
    s3 << inf, inf;
    bool select_ok = select(s1) == 1 && select(s2) == 0;
    try {
        select(s3);
        select_ok = false;
    } catch (const InvalidInput&) {
    }
    report(3, "criterion arithmetic", bad == 0 && guard_mismatch == 0 && select_ok,
           fmt::format("{} example mismatches, {} AICc guard mismatches", bad, guard_mismatch), since(start));
}

std::string within(double v, double lo, double hi)
{
    return fmt::format("{:.4g} in [{}, {}]", v, lo, hi);
}

void monte_carlo_criteria()
{
    using S = SelectorId;
    auto start = std::chrono::steady_clock::now();
    const ScenarioRun e100 = run(DesignKind::exponential, PenaltyMode::l1, 100, 0.3, {S::aicc});
    const ScenarioRun e200 = run(DesignKind::exponential, PenaltyMode::l1, 200, 0.3, {S::aicc});
    const ScenarioRun e400 = run(DesignKind::exponential, PenaltyMode::l1, 400, 0.3, {S::aic, S::aicc, S::bic});
    const ScenarioRun e400_8 = run(DesignKind::exponential, PenaltyMode::l1, 400, 0.8, {S::aic, S::aicc, S::bic});
    const ScenarioRun e400_98 = run(DesignKind::exponential, PenaltyMode::l1, 400, 0.98, {S::aic, S::aicc, S::bic});
    const double aicc3 = e400.summary.get("aicc").median_efficiency;
    const double bic8 = e400_8.summary.get("bic").median_efficiency;
    const double aic98 = e400_98.summary.get("aic").median_efficiency;
    const bool c4 = aicc3 >= 0.98 && aicc3 <= 1.06 && bic8 >= 1.45 && bic8 <= 2.15 && aic98 > 2.0;
    report(4, "exponential efficiencies at n = 400", c4,
           fmt::format("aicc c=.3 {}; bic c=.8 {}; aic c=.98 {:.4g} > 2", within(aicc3, 0.98, 1.06),
                       within(bic8, 1.45, 2.15), aic98),
           since(start));

    start = std::chrono::steady_clock::now();
    bool c5 = true;
    std::string detail5;
    for (PenaltyMode mode : {PenaltyMode::l1, PenaltyMode::scad_auto}) {
        const ScenarioRun r = run(DesignKind::exponential, mode, 200, 0.98, {S::aic, S::aicc});
        const double aic = r.summary.get("aic").df.median;
        const double aicc = r.summary.get("aicc").df.median;
        c5 = c5 && aic >= 2.0 * aicc;
        detail5 += fmt::format("{}{}: aic df {:.4g}, aicc df {:.4g}", detail5.empty() ? "" : "; ",
                               penalty_mode_name(mode), aic, aicc);
    }
    report(5, "AIC overfits relative to AICc", c5, detail5, since(start));

    start = std::chrono::steady_clock::now();
    const ScenarioRun p = run(DesignKind::poisson_trig, PenaltyMode::l1, 400, 0.5, {S::aic, S::aicc, S::bic});
    const double paic = p.summary.get("aic").median_efficiency;
    const double paicc = p.summary.get("aicc").median_efficiency;
    const double pbic = p.summary.get("bic").median_efficiency;
    const bool c6 = pbic >= paic + 0.3 && pbic >= paicc + 0.3 && paic <= 1.25 && paicc <= 1.25;
    report(6, "Poisson selector ordering", c6,
           fmt::format("aic {:.4g}, aicc {:.4g}, bic {:.4g}; {} failed realizations", paic, paicc, pbic,
                       p.summary.failed_realizations),
           since(start));

    const double m100 = e100.summary.get("aicc").median_efficiency;
    const double m200 = e200.summary.get("aicc").median_efficiency;
    const bool c7 = m200 <= m100 + 0.02 && aicc3 <= m200 + 0.02;
    report(7, "AICc efficiency settles with n", c7,
           fmt::format("n=100 {:.4g}, n=200 {:.4g}, n=400 {:.4g}", m100, m200, aicc3), 0.0);
}

// Runs the CLI on a few scenarios, then re-runs each from its manifest with
// 1 and 8 workers. Returns the number of mismatching records.csv files.
struct DeterminismResult
{
    int scenarios = 0;
    int mismatches = 0;
    std::string error;
};

int cli(std::vector<std::string> args, std::string& error)
{
    args.insert(args.begin(), "penreg");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (status != 0) error += err.str();
    return status;
}

DeterminismResult determinism_runs()
{
    DeterminismResult result;
    const fs::path root = fs::path(PENREG_TEST_TMP) / "acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string common = fmt::format("reps = 40\nseed = {}\ngrid_size = 100\nworkers = 1\n", acceptance_seed);
    write_file(root / "exponential.cfg", "design = exponential\nn = 200\nc = 0.5,0.8\npenalty = l1,scad\n"
                                         "selectors = cv10,aic,aicc,bic,cp,gcv,gamma\n" + common);
    write_file(root / "omitted.cfg", "design = omitted\nn = 200\nc = 0.5\nrho = 0.5\npenalty = l1,scad37\n"
                                     "selectors = cv10,aic,aicc,bic,cp,gcv,gamma\n" + common);
    write_file(root / "poisson.cfg", "design = poisson\nn = 200\nc = 0.5\npenalty = l1,scad\n"
                                     "selectors = cv10,aic,aicc,bic\n" + common);
    for (const char* name : {"exponential", "omitted", "poisson"}) {
        const fs::path out = root / name;
        if (cli({"simulate", "--config", (root / (std::string(name) + ".cfg")).string(), "--out", out.string()},
                result.error) != 0)
            return result;
        for (const auto& entry : fs::directory_iterator(out / "scenarios")) {
            const fs::path manifest = entry.path() / "manifest.txt";
            const std::string original = read_file(entry.path() / "records.csv");
            tally.add(parse_records(original));
            ++result.scenarios;
            for (const char* workers : {"1", "8"}) {
                const fs::path rerun = root / fmt::format("{}_rerun_{}", name, workers);
                if (cli({"simulate", "--config", manifest.string(), "--workers", workers, "--out", rerun.string()},
                        result.error) != 0)
                    return result;
                const std::string again =
                    read_file(rerun / "scenarios" / entry.path().filename() / "records.csv");
                result.mismatches += again != original;
            }
        }
    }
    return result;
}

void invariant_suite()
{
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(acceptance_seed);
    const GlmFamily poisson = GlmFamily::poisson();
    std::uniform_real_distribution<double> theta(-4.0, 4.0);
    int negative_kl = 0;
    for (int k = 0; k < 10000; ++k) {
        VectorXd t0(3), th(3);
        for (Index i = 0; i < 3; ++i) {
            t0(i) = theta(rng);
            th(i) = theta(rng);
        }
        const VectorXd mu = t0.array().exp();
        negative_kl += !(kl_loss(mu, t0, th, poisson) >= 0.0);
    }

    const PenaltyKind kinds[] = {PenaltyKind::l1(), PenaltyKind::scad(3.7), PenaltyKind::scad(5.0)};
    std::uniform_real_distribution<double> lam(0.05, 3.0), beta(0.0, 15.0);
    int fd_bad = 0;
    int fd_checked = 0;
    const double h = 1e-6;
    while (fd_checked < 1000) {
        const PenaltyKind& kind = kinds[fd_checked % 3];
        const double l = lam(rng);
        const double b = beta(rng);
        bool near_kink = b < 1e-3 || std::abs(b - l) < 1e-3;
        if (kind.is_scad()) near_kink = near_kink || std::abs(b - kind.a() * l) < 1e-3;
        if (near_kink) continue;
        const double fd = (penalty_value(kind, l, b + h) - penalty_value(kind, l, b - h)) / (2.0 * h);
        const double exact = penalty_derivative(kind, l, b);
        fd_bad += std::abs(fd - exact) > 1e-6 * std::max(1.0, std::abs(exact));
        ++fd_checked;
    }

    const bool pass = tally.below_one == 0 && tally.above_oracle == 0 && tally.violations == 0 && negative_kl == 0 &&
                      fd_bad == 0 && tally.rows > 0;
    report(8, "invariant suite", pass,
           fmt::format("{} rows with efficiency < 1 of {}, {} below oracle, {} objective rises in {} sweeps, "
                       "{} negative KL of 10000, {} derivative mismatches of 1000",
                       tally.below_one, tally.rows, tally.above_oracle, tally.violations, tally.sweeps, negative_kl,
                       fd_bad),
           since(start));
}

void bias_diagnostics()
{
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::string exp_detail, om_detail;
    for (Index n : {100, 200, 400}) {
        const Index d = dimension_for(n, 0.3);
        const double nd = static_cast<double>(n);
        const double exp_stat =
            projection_bias(trig_design(n, d), exponential_mean(n)) * static_cast<double>(d * d) / nd;
        const OmittedDesign o = omitted_design(n, 0.3, 0.0, 1);
        const double om_stat = projection_bias(o.train, o.mu_train) / nd;
        pass = pass && exp_stat >= exponential_bias_k1 && om_stat >= omitted_bias_k1;
        exp_detail += fmt::format(" {:.4g}", exp_stat);
        om_detail += fmt::format(" {:.4g}", om_stat);
    }
    report(9, "projection bias lower bounds", pass,
           fmt::format("exponential bias*d^2/n:{} (k1 = {}); omitted bias/n:{} (k1 = {})", exp_detail,
                       exponential_bias_k1, om_detail, omitted_bias_k1),
           since(start));
}

}  // namespace

int main()
{
    std::cout << fmt::format("acceptance: {} reps per scenario, seed {}, {} workers", acceptance_reps,
                             acceptance_seed, worker_count())
              << std::endl;
    try {
        solver_oracle();
        orthonormal_closed_form();
        criterion_arithmetic();
        monte_carlo_criteria();

        const auto det_start = std::chrono::steady_clock::now();
        const DeterminismResult det = determinism_runs();
        const double det_seconds = since(det_start);

        invariant_suite();
        bias_diagnostics();

        report(10, "byte-identical reruns", det.error.empty() && det.scenarios > 0 && det.mismatches == 0,
               det.error.empty()
                   ? fmt::format("{} scenarios rerun from manifests with 1 and 8 workers, {} mismatches",
                                 det.scenarios, det.mismatches)
                   : "cli error: " + det.error,
               det_seconds);
    } catch (const std::exception& e) {
        std::cout << "acceptance aborted: " << e.what() << std::endl;
        return 1;
    }
    std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
