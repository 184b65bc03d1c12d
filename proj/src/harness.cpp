#include "penreg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "penreg/error.hpp"
#include "penreg/generators.hpp"
#include "penreg/glm.hpp"
#include "penreg/linear_solver.hpp"
#include "penreg/loss.hpp"

namespace penreg {

std::string_view design_name(DesignKind kind)
{
    switch (kind) {
    case DesignKind::exponential: return "exponential";
    case DesignKind::omitted_predictor: return "omitted";
    case DesignKind::poisson_trig: return "poisson";
    }
    return "unknown";
}

DesignKind parse_design(std::string_view name)
{
    for (DesignKind kind : {DesignKind::exponential, DesignKind::omitted_predictor, DesignKind::poisson_trig}) {
        if (design_name(kind) == name) return kind;
    }
    throw InvalidInput(fmt::format("unknown design '{}' (expected exponential, omitted, poisson)", name));
}

std::string_view penalty_mode_name(PenaltyMode mode)
{
    switch (mode) {
    case PenaltyMode::l1: return "l1";
    case PenaltyMode::scad_auto: return "scad";
    case PenaltyMode::scad_fixed: return "scad37";
    }
    return "unknown";
}

PenaltyMode parse_penalty_mode(std::string_view name)
{
    for (PenaltyMode mode : {PenaltyMode::l1, PenaltyMode::scad_auto, PenaltyMode::scad_fixed}) {
        if (penalty_mode_name(mode) == name) return mode;
    }
    throw InvalidInput(fmt::format("unknown penalty '{}' (expected l1, scad, scad37)", name));
}

void Scenario::validate() const
{
    if (n < 4) throw InvalidInput("scenario needs n >= 4");
    if (!(c > 0.0 && c < 1.0)) throw InvalidInput("scenario needs c in (0, 1)");
    const Index d = dimension();
    if (d < 2) throw InvalidInput(fmt::format("d_n = {} is below 2 for n = {}, c = {}", d, n, c));
    if (d >= n) throw InvalidInput(fmt::format("d_n = {} must be below n = {}", d, n));
    if (reps < 1) throw InvalidInput("scenario needs reps >= 1");
    if (grid_size < 4 || grid_size % 2 != 0) throw InvalidInput("grid_size must be even and at least 4");
    if (sigma2 < 0.0) throw InvalidInput("sigma2 must be nonnegative");
    if (!(rho > -1.0 && rho < 1.0)) throw InvalidInput("rho must lie in (-1, 1)");
    if (selectors.empty()) throw InvalidInput("scenario lists no selectors");
    for (SelectorId id : selectors) {
        if (is_glm() && gaussian_only(id)) {
            throw InvalidInput(fmt::format("selector '{}' is only defined for Gaussian designs", selector_name(id)));
        }
        if (id == SelectorId::cv10 && (cv_folds < 2 || cv_folds > n)) {
            throw InvalidInput("cv_folds must lie in [2, n]");
        }
    }
}

const SelectorSummary& ScenarioSummary::get(std::string_view selector) const
{
    for (const auto& s : selectors) {
        if (s.selector == selector) return s;
    }
    throw InvalidInput(fmt::format("summary has no selector '{}'", selector));
}

std::vector<RecordRow> ScenarioRun::rows() const
{
    std::vector<RecordRow> out;
    for (const auto& record : records) out.insert(out.end(), record.rows.begin(), record.rows.end());
    return out;
}

double median(std::vector<double> values)
{
    if (values.empty()) throw InvalidInput("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size() / 2;
    if (values.size() % 2 == 1) return values[k];
    return 0.5 * (values[k - 1] + values[k]);
}

Quantiles quantiles(std::vector<double> values)
{
    if (values.empty()) throw InvalidInput("quantiles of an empty sample");
    std::sort(values.begin(), values.end());
    auto at = [&](double p) {
        const double h = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {values.front(), at(0.25), median(values), at(0.75), values.back()};
}

ScenarioSummary summarize_rows(const std::vector<RecordRow>& rows)
{
    ScenarioSummary summary;
    std::vector<std::string> order;
    for (const auto& row : rows) {
        if (std::find(order.begin(), order.end(), row.selector) == order.end()) order.push_back(row.selector);
        if (row.selector == oracle_name && row.flag == flag_failed) ++summary.failed_realizations;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& name : order) {
        SelectorSummary s;
        s.selector = name;
        std::vector<double> eff, loss, df;
        for (const auto& row : rows) {
            if (row.selector != name) continue;
            if (!row.usable()) {
                ++s.failures;
                continue;
            }
            eff.push_back(row.efficiency);
            loss.push_back(row.loss);
            df.push_back(static_cast<double>(row.df));
        }
        s.used = static_cast<int>(eff.size());
        if (eff.empty()) {
            s.median_efficiency = s.median_loss = nan;
            s.df = {nan, nan, nan, nan, nan};
        } else {
            s.median_efficiency = median(eff);
            s.median_loss = median(loss);
            s.df = quantiles(df);
        }
        summary.selectors.push_back(std::move(s));
    }
    return summary;
}

namespace {

/// Everything about a scenario that is shared by all realizations.
struct Fixture
{
    DesignMatrix design;
    DesignMatrix holdout;
    VectorXd mu;
    VectorXd mu_holdout;
    VectorXd theta0;
    std::optional<OlsProjector> full_model;
    PenaltyKind kind = PenaltyKind::l1();
    bool allow_nonconvex = false;
};

Fixture make_fixture(const Scenario& s, std::optional<double>& scad_a)
{
    Fixture fx;
    const Index d = s.dimension();
    switch (s.design) {
    case DesignKind::exponential:
        fx.design = standardize(trig_design(s.n, d));
        fx.mu = exponential_mean(s.n);
        break;
    case DesignKind::omitted_predictor: {
        OmittedDesign od = omitted_design(s.n, s.c, s.rho, s.design_seed);
        fx.design = standardize(std::move(od.train));
        fx.holdout = std::move(od.holdout);
        fx.mu = std::move(od.mu_train);
        fx.mu_holdout = std::move(od.mu_holdout);
        break;
    }
    case DesignKind::poisson_trig:
        fx.design = standardize(trig_design(s.n, d));
        fx.theta0 = poisson_theta(s.n);
        fx.mu = fx.theta0.array().exp();
        break;
    }
    switch (s.penalty) {
    case PenaltyMode::l1: break;
    case PenaltyMode::scad_auto:
        scad_a = convex_scad_a(gram_min_eigenvalue(fx.design));
        fx.kind = PenaltyKind::scad(*scad_a);
        break;
    case PenaltyMode::scad_fixed:
        scad_a = default_scad_a;
        fx.kind = PenaltyKind::scad(default_scad_a);
        fx.allow_nonconvex = true;
        break;
    }
    const bool wants_cp = std::find(s.selectors.begin(), s.selectors.end(), SelectorId::cp) != s.selectors.end();
    if (!s.is_glm() && wants_cp && fx.design.rows() > fx.design.cols() + 1) {
        fx.full_model.emplace(fx.design, all_columns(fx.design));
    }
    return fx;
}

RealizationRecord run_realization(const Scenario& s, const Fixture& fx, int rep)
{
    RealizationRecord record;
    record.rep = rep;
    const int n = static_cast<int>(s.n);
    const auto seed = static_cast<std::uint64_t>(rep);

    auto fail = [&](const std::string& why) {
        record.failed = true;
        record.failure = why;
        record.rows.clear();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (SelectorId id : s.selectors) {
            record.rows.push_back({rep, std::string(selector_name(id)), nan, -1, nan, nan, std::string(flag_failed)});
        }
        record.rows.push_back({rep, std::string(oracle_name), nan, -1, nan, nan, std::string(flag_failed)});
        return record;
    };

    try {
        Rng rng = stream_rng(s.base_seed, seed, 0);
        const std::uint64_t cv_seed = stream_rng(s.base_seed, seed, 1)();
        const auto grid = static_cast<std::size_t>(s.grid_size);

        VectorXd y;
        VectorXd lambdas;
        MatrixXd coefficients;
        std::vector<int> df;
        VectorXd losses;
        std::vector<std::pair<SelectorId, std::optional<SelectorScore>>> scores;

        if (s.is_glm()) {
            const GlmFamily family = GlmFamily::poisson();
            y = poisson_draws(fx.mu, rng);
            const double lmax = glm_lambda_max(fx.design, y, family);
            lambdas = lambda_grid_between(lmax, 1e-3 * lmax, grid);
            GlmOptions options;
            options.allow_nonconvex = fx.allow_nonconvex;
            const GlmPathFit fit = glm_fit_path(fx.design, y, family, fx.kind, lambdas, options);
            record.sweeps = fit.outer_iterations;
            record.monotonicity_violations = fit.monotonicity_violations;
            coefficients = fit.coefficients;
            df = fit.df;
            losses.resize(lambdas.size());
            for (Index g = 0; g < lambdas.size(); ++g) {
                losses(g) = kl_loss(fx.mu, fx.theta0, fx.design.predict(coefficients.row(g).transpose()), family);
            }
            for (SelectorId id : s.selectors) {
                try {
                    if (id == SelectorId::cv10) {
                        CvOptions cv;
                        cv.folds = s.cv_folds;
                        cv.seed = cv_seed;
                        cv.glm = options;
                        scores.emplace_back(id, kfold_cv(fx.design, y, fx.kind, lambdas, family, cv, df));
                    } else {
                        scores.emplace_back(id, score_glm_path(fit, id, n));
                    }
                } catch (const InvalidInput&) {
                    scores.emplace_back(id, std::nullopt);
                }
            }
        } else {
            y = fx.mu + gaussian_noise(s.n, s.sigma2, rng);
            lambdas = lambda_grid(fx.design, y, grid, 1e-4);
            PathOptions options;
            options.allow_nonconvex = fx.allow_nonconvex;
            const PathFit fit = fit_path(fx.design, y, fx.kind, lambdas, options);
            record.sweeps = fit.sweeps;
            record.monotonicity_violations = fit.monotonicity_violations;
            coefficients = fit.coefficients;
            df = fit.df;
            losses.resize(lambdas.size());
            for (Index g = 0; g < lambdas.size(); ++g) {
                const VectorXd row = coefficients.row(g).transpose();
                losses(g) = s.design == DesignKind::omitted_predictor ? holdout_l2_loss(fx.holdout, row, fx.mu_holdout)
                                                                      : l2_loss(fx.mu, fx.design.predict(row));
            }
            std::optional<double> s2_full;
            if (fx.full_model) {
                s2_full = fx.full_model->fit(y).rss / static_cast<double>(s.n - fx.design.cols() - 1);
            }
            for (SelectorId id : s.selectors) {
                try {
                    if (id == SelectorId::cv10) {
                        CvOptions cv;
                        cv.folds = s.cv_folds;
                        cv.seed = cv_seed;
                        cv.gaussian = options;
                        scores.emplace_back(id, kfold_cv(fx.design, y, fx.kind, lambdas, std::nullopt, cv, df));
                    } else if (id == SelectorId::cp && !s2_full) {
                        scores.emplace_back(id, std::nullopt);
                    } else {
                        scores.emplace_back(id, score_gaussian_path(fit, id, n, s2_full));
                    }
                } catch (const InvalidInput&) {
                    scores.emplace_back(id, std::nullopt);
                }
            }
        }

        record.lambda_max = lambdas(0);
        record.lambda_min = lambdas(lambdas.size() - 1);
        const LossReport report = loss_report(losses, {});
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const auto& [id, score] : scores) {
            RecordRow row{rep, std::string(selector_name(id)), nan, -1, nan, nan, std::string(flag_ok)};
            if (!score) {
                row.flag = id == SelectorId::cp ? flag_unavailable : flag_no_admissible;
            } else {
                const std::size_t g = score->selected_index;
                row.lambda = lambdas(static_cast<Index>(g));
                row.df = df[g];
                row.loss = report.losses(static_cast<Index>(g));
                row.efficiency = efficiency(report.losses, g);
                if (std::isinf(row.efficiency)) row.flag = flag_infinite;
            }
            record.rows.push_back(std::move(row));
        }
        const std::size_t oracle = report.oracle_index;
        record.rows.push_back({rep, std::string(oracle_name), lambdas(static_cast<Index>(oracle)), df[oracle],
                               report.min_loss, 1.0, std::string(flag_ok)});
        return record;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

}  // namespace

ScenarioRun run_scenario(const Scenario& scenario, int workers)
{
    scenario.validate();
    ScenarioRun run;
    run.scenario = scenario;
    run.dimension = scenario.dimension();
    const Fixture fx = make_fixture(scenario, run.scad_a);
    run.candidate_columns = fx.design.cols();
    if (fx.design.cols() >= scenario.n) {
        throw InvalidInput(fmt::format("scenario offers {} candidate columns for n = {}", fx.design.cols(), scenario.n));
    }

    run.records.resize(static_cast<std::size_t>(scenario.reps));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int rep = next++; rep < scenario.reps; rep = next++) {
            run.records[static_cast<std::size_t>(rep)] = run_realization(scenario, fx, rep);
        }
    };
    const int threads = std::clamp(workers, 1, scenario.reps);
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    run.summary = summarize_rows(run.rows());
    if (2 * run.summary.failed_realizations > scenario.reps) {
        std::string first;
        for (const auto& r : run.records) {
            if (r.failed) {
                first = r.failure;
                break;
            }
        }
        throw ScenarioFailure(fmt::format("{} of {} realizations failed; first failure: {}",
                                          run.summary.failed_realizations, scenario.reps, first));
    }
    return run;
}

}  // namespace penreg
