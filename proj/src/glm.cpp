#include "penreg/glm.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "penreg/error.hpp"

namespace penreg {

std::string GlmFamily::name() const
{
    switch (type_) {
    case Type::poisson: return "poisson";
    case Type::bernoulli_logit: return "bernoulli_logit";
    case Type::gaussian_unit: return "gaussian_unit";
    }
    return "unknown";
}

double GlmFamily::b(double theta) const
{
    switch (type_) {
    case Type::poisson: return std::exp(theta);
    case Type::bernoulli_logit:
        return theta > 0.0 ? theta + std::log1p(std::exp(-theta)) : std::log1p(std::exp(theta));
    case Type::gaussian_unit: return 0.5 * theta * theta;
    }
    return 0.0;
}

double GlmFamily::b_prime(double theta) const
{
    switch (type_) {
    case Type::poisson: return std::exp(theta);
    case Type::bernoulli_logit:
        if (theta >= 0.0) return 1.0 / (1.0 + std::exp(-theta));
        else {
            const double e = std::exp(theta);
            return e / (1.0 + e);
        }
    case Type::gaussian_unit: return theta;
    }
    return 0.0;
}

double GlmFamily::b_double_prime(double theta) const
{
    switch (type_) {
    case Type::poisson: return std::exp(theta);
    case Type::bernoulli_logit: {
        const double p = b_prime(theta);
        return p * (1.0 - p);
    }
    case Type::gaussian_unit: return 1.0;
    }
    return 1.0;
}

double GlmFamily::canonical_link(double mu) const
{
    switch (type_) {
    case Type::poisson: return std::log(mu);
    case Type::bernoulli_logit: return std::log(mu / (1.0 - mu));
    case Type::gaussian_unit: return mu;
    }
    return mu;
}

namespace {

void check_glm_response(const DesignMatrix& design, const VectorXd& y, const GlmFamily& family)
{
    if (y.size() != design.rows()) {
        throw InvalidInput(fmt::format("response has {} entries, design has {} rows", y.size(), design.rows()));
    }
    if (!y.allFinite()) throw InvalidInput("response contains non-finite values");
    const double mean = y.mean();
    switch (family.type()) {
    case GlmFamily::Type::poisson:
        if (y.minCoeff() < 0.0) throw InvalidInput("Poisson response must be nonnegative");
        if (!(mean > 0.0)) throw InvalidInput("Poisson response is all zero; intercept-only model has no MLE");
        break;
    case GlmFamily::Type::bernoulli_logit:
        if (y.minCoeff() < 0.0 || y.maxCoeff() > 1.0) throw InvalidInput("Bernoulli response must lie in [0, 1]");
        if (!(mean > 0.0 && mean < 1.0)) {
            throw InvalidInput("Bernoulli response is constant; intercept-only model has no MLE");
        }
        break;
    case GlmFamily::Type::gaussian_unit: break;
    }
}

double loglik_of(const VectorXd& y, const VectorXd& theta, const GlmFamily& family)
{
    double total = 0.0;
    for (Index i = 0; i < y.size(); ++i) total += y(i) * theta(i) - family.b(theta(i));
    return total;
}

double penalty_sum(const PenaltyKind& kind, double lambda, const VectorXd& b)
{
    double total = 0.0;
    for (Index j = 0; j < b.size(); ++j) total += penalty_value(kind, lambda, b(j));
    return total;
}

bool outside_clamp(const VectorXd& theta, const GlmFamily& family)
{
    return family.type() == GlmFamily::Type::poisson && theta.cwiseAbs().maxCoeff() > theta_clamp;
}

}  // namespace

double glm_lambda_max(const DesignMatrix& design, const VectorXd& y, const GlmFamily& family)
{
    check_glm_response(design, y, family);
    const DesignMatrix sd = ensure_standardized(design);
    VectorXd resid = y;
    if (sd.intercept()) resid.array() -= family.b_prime(family.canonical_link(y.mean()));
    const VectorXd scores = sd.standardized().transpose() * resid / static_cast<double>(y.size());
    return scores.cwiseAbs().maxCoeff();
}

GlmPartialPathFit try_glm_fit_path(const DesignMatrix& design, const VectorXd& y, const GlmFamily& family,
                                   const PenaltyKind& kind, const VectorXd& lambdas, const GlmOptions& options)
{
    check_glm_response(design, y, family);
    for (Index g = 0; g < lambdas.size(); ++g) {
        if (!(lambdas(g) >= 0.0) || (g > 0 && !(lambdas(g) < lambdas(g - 1)))) {
            throw InvalidInput("lambda grid must be nonnegative and strictly decreasing");
        }
    }
    const DesignMatrix sd = ensure_standardized(design);
    if (kind.is_scad() && !options.allow_nonconvex) {
        const double required = convex_scad_a(gram_min_eigenvalue(sd));
        if (kind.a() < required * (1.0 - 1e-12)) {
            throw InvalidInput(fmt::format("SCAD a = {:.6g} is below the convexity bound {:.6g}", kind.a(), required));
        }
    }

    const MatrixXd& xs = sd.standardized();
    const Index n = xs.rows();
    const Index d = xs.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    GlmPartialPathFit out;
    GlmPathFit& fit = out.fit;

    double b0 = sd.intercept() ? family.canonical_link(y.mean()) : 0.0;
    VectorXd b = VectorXd::Zero(d);
    VectorXd theta = VectorXd::Constant(n, b0);

    std::vector<VectorXd> rows;
    std::vector<double> logliks;
    std::vector<double> objectives;

    VectorXd w(n), r(n), wx(n), v(d), c(d);
    std::vector<char> active(static_cast<std::size_t>(d), 0);

    for (Index g = 0; g < lambdas.size() && !out.failed_at; ++g) {
        const double lambda = lambdas(g);
        auto objective = [&](const VectorXd& th, const VectorXd& slopes) {
            return -inv_n * loglik_of(y, th, family) + penalty_sum(kind, lambda, slopes);
        };
        double current = objective(theta, b);
        bool converged = false;

        for (int outer = 0; outer < options.max_iter; ++outer) {
            ++fit.outer_iterations;
            for (Index i = 0; i < n; ++i) {
                const double var = std::max(family.b_double_prime(theta(i)), 1e-10);
                w(i) = var;
                r(i) = (y(i) - family.b_prime(theta(i))) / var;
            }
            const double w_sum = w.sum();
            for (Index j = 0; j < d; ++j) v(j) = xs.col(j).cwiseAbs2().dot(w) * inv_n;

            // Penalized weighted least squares on the working response.
            double c0 = b0;
            c = b;
            auto sweep = [&](bool active_only) {
                double max_change = 0.0;
                if (sd.intercept()) {
                    const double delta = w.dot(r) / w_sum;
                    c0 += delta;
                    r.array() -= delta;
                    max_change = std::abs(delta);
                }
                for (Index j = 0; j < d; ++j) {
                    if (active_only && !active[static_cast<std::size_t>(j)]) continue;
                    wx = w.cwiseProduct(xs.col(j));
                    const double grad = wx.dot(r) * inv_n + v(j) * c(j);
                    const double updated = std::abs(grad) <= lambda * (1.0 + 1e-10)
                                               ? 0.0
                                               : weighted_univariate_update(grad, v(j), lambda, kind);
                    const double delta = updated - c(j);
                    if (delta != 0.0) {
                        r.noalias() -= delta * xs.col(j);
                        c(j) = updated;
                        max_change = std::max(max_change, std::abs(delta));
                    }
                    active[static_cast<std::size_t>(j)] = updated != 0.0;
                }
                return max_change;
            };
            bool inner_ok = false;
            for (int it = 0; it < options.inner_max_iter;) {
                ++it;
                if (sweep(false) < options.inner_tol) {
                    inner_ok = true;
                    break;
                }
                while (it < options.inner_max_iter) {
                    ++it;
                    if (sweep(true) < options.inner_tol) break;
                }
            }
            if (!inner_ok) {
                out.failed_at = static_cast<std::size_t>(g);
                out.failure = "inner coordinate descent did not converge";
                break;
            }

            const double step0 = c0 - b0;
            const VectorXd step = c - b;
            VectorXd dtheta = xs * step;
            dtheta.array() += step0;

            double t = 1.0;
            bool accepted = false;
            double next = current;
            VectorXd trial_theta(n), trial_b(d);
            for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
                trial_theta = theta + t * dtheta;
                if (outside_clamp(trial_theta, family)) continue;
                trial_b = b + t * step;
                next = objective(trial_theta, trial_b);
                if (std::isfinite(next) && next <= current + 1e-12 * std::max(1.0, std::abs(current))) {
                    accepted = true;
                    break;
                }
            }
            const double step_size = std::max(std::abs(step0), step.size() ? step.cwiseAbs().maxCoeff() : 0.0);
            if (!accepted) {
                if (step_size < 1e-8) {
                    converged = true;
                    break;
                }
                out.failed_at = static_cast<std::size_t>(g);
                out.failure = outside_clamp(theta + dtheta, family)
                                  ? "natural parameter left the [-30, 30] clamp"
                                  : "step halving failed to decrease the penalized objective";
                break;
            }
            if (next > current + 1e-12 * std::max(1.0, std::abs(current))) ++fit.monotonicity_violations;
            theta = trial_theta;
            b = trial_b;
            b0 += t * step0;
            const double change = current - next;
            current = next;
            if (std::abs(change) < options.tol && t * step_size < std::sqrt(options.tol)) {
                converged = true;
                break;
            }
        }
        if (out.failed_at) break;
        if (!converged) {
            out.failed_at = static_cast<std::size_t>(g);
            out.failure = fmt::format("IRLS did not converge within {} iterations", options.max_iter);
            break;
        }

        VectorXd row(d + 1);
        row.tail(d) = b.cwiseQuotient(sd.column_scales());
        row(0) = sd.intercept() ? b0 - row.tail(d).dot(sd.column_means()) : 0.0;
        rows.push_back(std::move(row));
        logliks.push_back(loglik_of(y, theta, family));
        objectives.push_back(current);
    }

    const Index solved = static_cast<Index>(rows.size());
    fit.lambdas = lambdas.head(solved);
    fit.coefficients.resize(solved, d + 1);
    fit.loglik.resize(solved);
    fit.objective.resize(solved);
    fit.df.resize(static_cast<std::size_t>(solved));
    for (Index g = 0; g < solved; ++g) {
        const VectorXd& row = rows[static_cast<std::size_t>(g)];
        fit.coefficients.row(g) = row.transpose();
        fit.loglik(g) = logliks[static_cast<std::size_t>(g)];
        fit.objective(g) = objectives[static_cast<std::size_t>(g)];
        int count = sd.intercept() ? 1 : 0;
        for (Index j = 1; j <= d; ++j) count += row(j) != 0.0 ? 1 : 0;
        fit.df[static_cast<std::size_t>(g)] = count;
    }
    return out;
}

GlmPathFit glm_fit_path(const DesignMatrix& design, const VectorXd& y, const GlmFamily& family,
                        const PenaltyKind& kind, const VectorXd& lambdas, const GlmOptions& options)
{
    GlmPartialPathFit partial = try_glm_fit_path(design, y, family, kind, lambdas, options);
    if (partial.failed_at) throw ConvergenceError(partial.failure, *partial.failed_at);
    return std::move(partial.fit);
}

VectorXd pseudo_true_theta(const DesignMatrix& design, const VectorXd& mu, const GlmFamily& family,
                           const std::vector<Index>& support)
{
    const Index n = design.rows();
    if (mu.size() != n) throw InvalidInput("mean vector length does not match design rows");
    const Index width = static_cast<Index>(support.size()) + (design.intercept() ? 1 : 0);
    if (width == 0) throw InvalidInput("pseudo-true parameter needs a nonempty support or an intercept");

    MatrixXd basis(n, width);
    Index k = 0;
    if (design.intercept()) basis.col(k++).setOnes();
    for (Index j : support) {
        if (j < 0 || j >= design.cols()) throw InvalidInput(fmt::format("support index {} out of range", j));
        basis.col(k++) = design.values().col(j);
    }

    VectorXd beta = VectorXd::Zero(width);
    if (design.intercept()) beta(0) = family.canonical_link(mu.mean());
    VectorXd theta = basis * beta;
    auto objective = [&](const VectorXd& th) { return loglik_of(mu, th, family); };
    double current = objective(theta);

    const double scale = std::max(1.0, (basis.transpose() * mu).cwiseAbs().maxCoeff());
    for (int iter = 0; iter < 200; ++iter) {
        VectorXd resid(n), w(n);
        for (Index i = 0; i < n; ++i) {
            resid(i) = mu(i) - family.b_prime(theta(i));
            w(i) = family.b_double_prime(theta(i));
        }
        const VectorXd score = basis.transpose() * resid;
        if (score.cwiseAbs().maxCoeff() < 1e-12 * scale) return theta;
        const MatrixXd info = basis.transpose() * w.asDiagonal() * basis;
        const VectorXd step = info.ldlt().solve(score);

        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
            const VectorXd trial = basis * (beta + t * step);
            const double value = objective(trial);
            if (std::isfinite(value) && value >= current - 1e-14 * std::max(1.0, std::abs(current))) {
                beta += t * step;
                theta = trial;
                current = value;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        if (t * step.cwiseAbs().maxCoeff() < 1e-15) break;
    }
    VectorXd resid(n);
    for (Index i = 0; i < n; ++i) resid(i) = mu(i) - family.b_prime(theta(i));
    if ((basis.transpose() * resid).norm() > 1e-8 * scale) {
        throw ConvergenceError("Newton iteration for the pseudo-true parameter did not converge");
    }
    return theta;
}

}  // namespace penreg
