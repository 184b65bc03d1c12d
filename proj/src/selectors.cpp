#include "penreg/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "penreg/error.hpp"

namespace penreg {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double log_or_inf(double sigma2_hat)
{
    return sigma2_hat > 0.0 ? std::log(sigma2_hat) : inf;
}

}  // namespace

std::string_view selector_name(SelectorId id)
{
    switch (id) {
    case SelectorId::cv10: return "cv10";
    case SelectorId::aic: return "aic";
    case SelectorId::aicc: return "aicc";
    case SelectorId::bic: return "bic";
    case SelectorId::cp: return "cp";
    case SelectorId::gcv: return "gcv";
    case SelectorId::gamma: return "gamma";
    }
    return "unknown";
}

SelectorId parse_selector(std::string_view name)
{
    for (SelectorId id : all_selectors) {
        if (selector_name(id) == name) return id;
    }
    throw InvalidInput(fmt::format("unknown selector '{}' (expected cv10, aic, aicc, bic, cp, gcv, gamma)", name));
}

bool gaussian_only(SelectorId id)
{
    return id == SelectorId::cp || id == SelectorId::gcv || id == SelectorId::gamma;
}

double aic_gauss(double sigma2_hat, int df, int n)
{
    return log_or_inf(sigma2_hat) + 2.0 * df / static_cast<double>(n);
}

double aicc_gauss(double sigma2_hat, int df, int n)
{
    if (df >= n - 2) return inf;
    return log_or_inf(sigma2_hat) + 2.0 * (df + 1) / static_cast<double>(n - df - 2);
}

double bic_gauss(double sigma2_hat, int df, int n)
{
    return log_or_inf(sigma2_hat) + std::log(static_cast<double>(n)) * df / static_cast<double>(n);
}

double gcv(double sigma2_hat, int df, int n)
{
    if (df >= n) return inf;
    const double shrink = 1.0 - df / static_cast<double>(n);
    return sigma2_hat / (shrink * shrink);
}

double cp(double sigma2_hat, int df, int n, double sigma_tilde2)
{
    return sigma2_hat + 2.0 * df * sigma_tilde2 / static_cast<double>(n);
}

double gamma_n(double sigma2_hat, int df, int n)
{
    return sigma2_hat * (1.0 + 2.0 * df / static_cast<double>(n));
}

double aic_glm(double loglik, int df, int n)
{
    return -2.0 * loglik / n + 2.0 * df / static_cast<double>(n);
}

double aicc_glm(double loglik, int df, int n)
{
    if (df >= n - 2) return inf;
    return -2.0 * loglik / n + 2.0 * (df + 1) / static_cast<double>(n - df - 2);
}

double bic_glm(double loglik, int df, int n)
{
    return -2.0 * loglik / n + std::log(static_cast<double>(n)) * df / static_cast<double>(n);
}

std::size_t select(const VectorXd& values)
{
    std::optional<std::size_t> best;
    for (Index g = 0; g < values.size(); ++g) {
        const double v = values(g);
        if (std::isnan(v) || v == inf) continue;
        if (!best || v < values(static_cast<Index>(*best))) best = static_cast<std::size_t>(g);
    }
    if (!best) throw InvalidInput("no admissible lambda");
    return *best;
}

namespace {

SelectorScore finish(SelectorId id, VectorXd values, const VectorXd& lambdas, const std::vector<int>& df)
{
    SelectorScore score;
    score.name = std::string(selector_name(id));
    score.values = std::move(values);
    score.selected_index = select(score.values);
    score.selected_lambda = lambdas(static_cast<Index>(score.selected_index));
    score.selected_df = df.empty() ? -1 : df[score.selected_index];
    return score;
}

}  // namespace

SelectorScore score_gaussian_path(const PathFit& fit, SelectorId id, int n, std::optional<double> sigma_tilde2)
{
    const Index grid = fit.lambdas.size();
    VectorXd values(grid);
    for (Index g = 0; g < grid; ++g) {
        const double s2 = fit.sigma2_hat(g);
        const int df = fit.df[static_cast<std::size_t>(g)];
        switch (id) {
        case SelectorId::aic: values(g) = aic_gauss(s2, df, n); break;
        case SelectorId::aicc: values(g) = aicc_gauss(s2, df, n); break;
        case SelectorId::bic: values(g) = bic_gauss(s2, df, n); break;
        case SelectorId::gcv: values(g) = gcv(s2, df, n); break;
        case SelectorId::gamma: values(g) = gamma_n(s2, df, n); break;
        case SelectorId::cp:
            if (!sigma_tilde2) throw InvalidInput("Cp needs the full-model variance, which is unavailable");
            values(g) = cp(s2, df, n, *sigma_tilde2);
            break;
        case SelectorId::cv10: throw InvalidInput("cv10 is scored by kfold_cv, not from a single path");
        }
    }
    return finish(id, std::move(values), fit.lambdas, fit.df);
}

SelectorScore score_glm_path(const GlmPathFit& fit, SelectorId id, int n)
{
    const Index grid = fit.lambdas.size();
    VectorXd values(grid);
    for (Index g = 0; g < grid; ++g) {
        const double ll = fit.loglik(g);
        const int df = fit.df[static_cast<std::size_t>(g)];
        switch (id) {
        case SelectorId::aic: values(g) = aic_glm(ll, df, n); break;
        case SelectorId::aicc: values(g) = aicc_glm(ll, df, n); break;
        case SelectorId::bic: values(g) = bic_glm(ll, df, n); break;
        default:
            throw InvalidInput(fmt::format("selector '{}' is not defined for GLM paths", selector_name(id)));
        }
    }
    return finish(id, std::move(values), fit.lambdas, fit.df);
}

std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed)
{
    if (folds < 2) throw InvalidInput("cross-validation needs at least 2 folds");
    if (n < folds) throw InvalidInput(fmt::format("cannot split {} observations into {} folds", n, folds));
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        fold[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    }
    return fold;
}

SelectorScore kfold_cv(const DesignMatrix& design, const VectorXd& y, const PenaltyKind& kind,
                       const VectorXd& lambdas, const std::optional<GlmFamily>& family, const CvOptions& options,
                       const std::vector<int>& df_on_full_path)
{
    const Index n = design.rows();
    if (y.size() != n) throw InvalidInput("response length does not match design rows");
    const std::vector<int> fold = fold_assignment(n, options.folds, options.seed);
    const Index grid = lambdas.size();
    VectorXd total = VectorXd::Zero(grid);

    PathOptions gaussian = options.gaussian;
    GlmOptions glm = options.glm;
    // Training subsets have their own Gram spectrum; the caller's penalty is
    // used as given.
    gaussian.allow_nonconvex = true;
    glm.allow_nonconvex = true;

    for (int f = 0; f < options.folds; ++f) {
        std::vector<Index> train, test;
        for (Index i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        VectorXd fold_error = VectorXd::Constant(grid, std::numeric_limits<double>::infinity());
        try {
            const DesignMatrix train_design = design.subset_rows(train);
            const DesignMatrix test_design = design.subset_rows(test);
            VectorXd y_train(static_cast<Index>(train.size())), y_test(static_cast<Index>(test.size()));
            for (std::size_t i = 0; i < train.size(); ++i) y_train(static_cast<Index>(i)) = y(train[i]);
            for (std::size_t i = 0; i < test.size(); ++i) y_test(static_cast<Index>(i)) = y(test[i]);
            const double m = static_cast<double>(test.size());

            MatrixXd coefficients;
            if (family) {
                coefficients = try_glm_fit_path(train_design, y_train, *family, kind, lambdas, glm).fit.coefficients;
            } else {
                coefficients = try_fit_path(train_design, y_train, kind, lambdas, gaussian).fit.coefficients;
            }
            for (Index g = 0; g < coefficients.rows(); ++g) {
                const VectorXd pred = test_design.predict(coefficients.row(g).transpose());
                if (family) {
                    double ll = 0.0;
                    for (Index i = 0; i < pred.size(); ++i) ll += y_test(i) * pred(i) - family->b(pred(i));
                    fold_error(g) = -2.0 * ll / m;
                } else {
                    fold_error(g) = (y_test - pred).squaredNorm() / m;
                }
            }
        } catch (const std::exception&) {
            // Fold could not be fitted at all (e.g. a column constant on the
            // training rows); every lambda stays at +inf for this fold.
        }
        total += fold_error;
    }
    total /= static_cast<double>(options.folds);

    std::vector<int> df = df_on_full_path;
    if (df.empty()) {
        if (family) {
            df = try_glm_fit_path(design, y, *family, kind, lambdas, glm).fit.df;
        } else {
            df = try_fit_path(design, y, kind, lambdas, gaussian).fit.df;
        }
        df.resize(static_cast<std::size_t>(grid), -1);
    }
    return finish(SelectorId::cv10, std::move(total), lambdas, df);
}

}  // namespace penreg
