#include "penreg/linear_solver.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "penreg/error.hpp"

namespace penreg {

namespace {

void check_response(const DesignMatrix& design, const VectorXd& y)
{
    if (y.size() != design.rows()) {
        throw InvalidInput(fmt::format("response has {} entries, design has {} rows", y.size(), design.rows()));
    }
    if (!y.allFinite()) throw InvalidInput("response contains non-finite values");
}

void check_lambdas(const VectorXd& lambdas)
{
    if (lambdas.size() == 0) throw InvalidInput("lambda grid is empty");
    for (Index g = 0; g < lambdas.size(); ++g) {
        if (!(lambdas(g) >= 0.0) || !std::isfinite(lambdas(g))) {
            throw InvalidInput("lambda values must be finite and nonnegative");
        }
        if (g > 0 && !(lambdas(g) < lambdas(g - 1))) {
            throw InvalidInput("lambda grid must be strictly decreasing");
        }
    }
}

double penalty_sum(const PenaltyKind& kind, double lambda, const VectorXd& b)
{
    double total = 0.0;
    for (Index j = 0; j < b.size(); ++j) total += penalty_value(kind, lambda, b(j));
    return total;
}

bool rose(double before, double after)
{
    return after > before + 1e-12 * std::max(1.0, std::abs(before));
}

}  // namespace

std::vector<Index> all_columns(const DesignMatrix& design)
{
    std::vector<Index> cols(static_cast<std::size_t>(design.cols()));
    for (Index j = 0; j < design.cols(); ++j) cols[static_cast<std::size_t>(j)] = j;
    return cols;
}

double gaussian_lambda_max(const DesignMatrix& design, const VectorXd& y)
{
    check_response(design, y);
    const DesignMatrix sd = ensure_standardized(design);
    VectorXd centered = y;
    if (sd.intercept()) centered.array() -= y.mean();
    const VectorXd scores = sd.standardized().transpose() * centered / static_cast<double>(y.size());
    return scores.cwiseAbs().maxCoeff();
}

VectorXd lambda_grid_between(double lambda_max, double lambda_min, std::size_t count)
{
    if (count < 4 || count % 2 != 0) throw InvalidInput("lambda grid size must be even and at least 4");
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        throw InvalidInput("lambda_max is zero: the response carries no signal to penalize");
    }
    if (!(lambda_min > 0.0) || !(lambda_min < lambda_max)) {
        throw InvalidInput("lambda_min must lie in (0, lambda_max)");
    }
    const std::size_t half = count / 2;
    const double log_max = std::log(lambda_max);
    const double log_min = std::log(lambda_min);
    const double log_mid = 0.5 * (log_max + log_min);
    const double mid = std::exp(log_mid);

    VectorXd grid(static_cast<Index>(count));
    for (std::size_t k = 0; k < half; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(half - 1);
        grid(static_cast<Index>(k)) = std::exp(log_max + t * (log_mid - log_max));
    }
    grid(0) = lambda_max;
    const double step = (mid - lambda_min) / static_cast<double>(half);
    for (std::size_t k = 1; k <= half; ++k) {
        grid(static_cast<Index>(half + k - 1)) = mid - static_cast<double>(k) * step;
    }
    grid(static_cast<Index>(count - 1)) = lambda_min;
    return grid;
}

VectorXd lambda_grid(const DesignMatrix& design, const VectorXd& y, std::size_t count, double min_ratio)
{
    const double lmax = gaussian_lambda_max(design, y);
    if (!(lmax > 0.0)) throw InvalidInput("lambda_max is zero: the response is constant");
    return lambda_grid_between(lmax, min_ratio * lmax, count);
}

PartialPathFit try_fit_path(const DesignMatrix& design, const VectorXd& y, const PenaltyKind& kind,
                            const VectorXd& lambdas, const PathOptions& options)
{
    check_response(design, y);
    check_lambdas(lambdas);
    const DesignMatrix sd = ensure_standardized(design);
    if (kind.is_scad() && !options.allow_nonconvex) {
        const double required = convex_scad_a(gram_min_eigenvalue(sd));
        if (kind.a() < required * (1.0 - 1e-12)) {
            throw InvalidInput(fmt::format(
                "SCAD a = {:.6g} is below the convexity bound {:.6g}; enable allow_nonconvex to fit anyway",
                kind.a(), required));
        }
    }

    const MatrixXd& xs = sd.standardized();
    const Index n = xs.rows();
    const Index d = xs.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    const Index grid = lambdas.size();

    PartialPathFit out;
    PathFit& fit = out.fit;
    fit.kind = kind;
    fit.intercept = sd.intercept();

    double b0 = sd.intercept() ? y.mean() : 0.0;
    VectorXd b = VectorXd::Zero(d);
    VectorXd r = y.array() - b0;

    std::vector<VectorXd> coef_rows;
    std::vector<double> objectives;
    coef_rows.reserve(static_cast<std::size_t>(grid));

    for (Index g = 0; g < grid; ++g) {
        const double lambda = lambdas(g);
        double previous = 0.5 * inv_n * r.squaredNorm() + penalty_sum(kind, lambda, b);
        bool converged = false;
        // Full sweeps alternate with sweeps over the nonzero coefficients;
        // convergence is only declared after a full sweep.
        bool active_only = false;
        for (int iter = 0; iter < options.max_iter; ++iter) {
            double max_change = 0.0;
            for (Index j = 0; j < d; ++j) {
                if (active_only && b(j) == 0.0) continue;
                const double z = xs.col(j).dot(r) * inv_n + b(j);
                // Both penalties zero a coordinate with |z| <= lambda; the slack
                // keeps rounding from reviving slopes exactly at lambda_max.
                const double updated =
                    std::abs(z) <= lambda * (1.0 + 1e-10) ? 0.0 : univariate_update(z, lambda, kind);
                const double delta = updated - b(j);
                if (delta != 0.0) {
                    r.noalias() -= delta * xs.col(j);
                    b(j) = updated;
                    max_change = std::max(max_change, std::abs(delta));
                }
            }
            if (sd.intercept()) {
                const double shift = r.mean();
                r.array() -= shift;
                b0 += shift;
            }
            ++fit.sweeps;
            const double current = 0.5 * inv_n * r.squaredNorm() + penalty_sum(kind, lambda, b);
            if (rose(previous, current)) ++fit.monotonicity_violations;
            previous = current;
            if (max_change < options.tol) {
                if (!active_only) {
                    converged = true;
                    break;
                }
                active_only = false;
            } else {
                active_only = true;
            }
        }
        if (!converged) {
            out.failed_at = static_cast<std::size_t>(g);
            break;
        }

        VectorXd row(d + 1);
        if (sd.intercept()) {
            row.tail(d) = b.cwiseQuotient(sd.column_scales());
            row(0) = b0 - row.tail(d).dot(sd.column_means());
        } else {
            row(0) = 0.0;
            row.tail(d) = b.cwiseQuotient(sd.column_scales());
        }
        coef_rows.push_back(std::move(row));
        objectives.push_back(previous);
    }

    const Index solved = static_cast<Index>(coef_rows.size());
    fit.lambdas = lambdas.head(solved);
    fit.coefficients.resize(solved, d + 1);
    fit.sigma2_hat.resize(solved);
    fit.objective.resize(solved);
    fit.df.resize(static_cast<std::size_t>(solved));
    for (Index g = 0; g < solved; ++g) {
        const VectorXd& row = coef_rows[static_cast<std::size_t>(g)];
        fit.coefficients.row(g) = row.transpose();
        const VectorXd resid = y - design.predict(row);
        fit.sigma2_hat(g) = resid.squaredNorm() * inv_n;
        fit.objective(g) = objectives[static_cast<std::size_t>(g)];
        int count = sd.intercept() ? 1 : 0;
        for (Index j = 1; j <= d; ++j) count += row(j) != 0.0 ? 1 : 0;
        fit.df[static_cast<std::size_t>(g)] = count;
    }
    return out;
}

PathFit fit_path(const DesignMatrix& design, const VectorXd& y, const PenaltyKind& kind, const VectorXd& lambdas,
                 const PathOptions& options)
{
    PartialPathFit partial = try_fit_path(design, y, kind, lambdas, options);
    if (partial.failed_at) {
        throw ConvergenceError(
            fmt::format("coordinate descent did not converge within {} sweeps", options.max_iter), *partial.failed_at);
    }
    return std::move(partial.fit);
}

OlsProjector::OlsProjector(const DesignMatrix& design, std::vector<Index> support)
    : d_(design.cols()), intercept_(design.intercept()), support_(std::move(support))
{
    std::sort(support_.begin(), support_.end());
    support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
    const Index n = design.rows();
    const Index width = static_cast<Index>(support_.size()) + (intercept_ ? 1 : 0);
    if (width > n) throw RankDeficientError("more least-squares columns than observations");
    basis_.resize(n, width);
    Index k = 0;
    if (intercept_) basis_.col(k++).setOnes();
    for (Index j : support_) {
        if (j < 0 || j >= d_) throw InvalidInput(fmt::format("support index {} out of range", j));
        basis_.col(k++) = design.values().col(j);
    }
    if (width > 0) {
        qr_.compute(basis_);
        if (qr_.rank() < width) throw RankDeficientError("least-squares submatrix is rank deficient");
    }
}

OlsFit OlsProjector::fit(const VectorXd& y) const
{
    OlsFit out;
    out.coefficients = VectorXd::Zero(d_ + 1);
    if (basis_.cols() == 0) {
        out.rss = y.squaredNorm();
        return out;
    }
    const VectorXd beta = qr_.solve(y);
    Index k = 0;
    if (intercept_) out.coefficients(0) = beta(k++);
    for (Index j : support_) out.coefficients(j + 1) = beta(k++);
    out.rss = (y - basis_ * beta).squaredNorm();
    return out;
}

VectorXd OlsProjector::residual(const VectorXd& y) const
{
    if (basis_.cols() == 0) return y;
    return y - basis_ * qr_.solve(y);
}

OlsFit ols_refit(const DesignMatrix& design, const std::vector<Index>& support, const VectorXd& y)
{
    check_response(design, y);
    return OlsProjector(design, support).fit(y);
}

double sigma_tilde(const DesignMatrix& design, const VectorXd& y)
{
    const Index n = design.rows();
    const Index d = design.cols();
    if (n <= d + 1) {
        throw InvalidInput(fmt::format("full-model variance needs n > d + 1 (n = {}, d = {})", n, d));
    }
    return ols_refit(design, all_columns(design), y).rss / static_cast<double>(n - d - 1);
}

}  // namespace penreg
