#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "penreg/design.hpp"
#include "penreg/penalties.hpp"

namespace penreg {

/// Canonical-link exponential family without a dispersion parameter,
/// density exp(y * theta - b(theta) + c(y)).
class GlmFamily
{
public:
    enum class Type { poisson, bernoulli_logit, gaussian_unit };

    static GlmFamily poisson() { return GlmFamily(Type::poisson); }
    static GlmFamily bernoulli_logit() { return GlmFamily(Type::bernoulli_logit); }
    /// b(theta) = theta^2 / 2. Only used to cross-check the KL loss against
    /// the L2 loss; the Gaussian path has its own solver.
    static GlmFamily gaussian_unit() { return GlmFamily(Type::gaussian_unit); }

    Type type() const { return type_; }
    std::string name() const;

    double b(double theta) const;
    /// Mean function.
    double b_prime(double theta) const;
    /// Variance function, strictly positive.
    double b_double_prime(double theta) const;
    /// Inverse of b_prime.
    double canonical_link(double mu) const;

    friend bool operator==(const GlmFamily&, const GlmFamily&) = default;

private:
    explicit GlmFamily(Type t) : type_(t) {}
    Type type_;
};

/// Poisson natural parameters are held inside [-theta_clamp, theta_clamp].
inline constexpr double theta_clamp = 30.0;

struct GlmPathFit
{
    VectorXd lambdas;
    /// Row g: [intercept, slopes...] on the original scale.
    MatrixXd coefficients;
    std::vector<int> df;
    /// sum_i y_i theta_i - b(theta_i); the c(y) term is omitted.
    VectorXd loglik;
    /// -(1/n) loglik + sum_j p_lambda(|b_j|) on the standardized scale.
    VectorXd objective;
    std::size_t outer_iterations = 0;
    std::size_t monotonicity_violations = 0;

    std::size_t size() const { return static_cast<std::size_t>(lambdas.size()); }
};

struct GlmPartialPathFit
{
    GlmPathFit fit;
    std::optional<std::size_t> failed_at;
    std::string failure;
};

struct GlmOptions
{
    double tol = 1e-7;
    int max_iter = 200;
    double inner_tol = 1e-10;
    int inner_max_iter = 10000;
    bool allow_nonconvex = false;
};

/// max_j |<x_j, y - b'(theta0)>| / n where theta0 is the intercept-only MLE.
double glm_lambda_max(const DesignMatrix& design, const VectorXd& y, const GlmFamily& family);

/// Penalized IRLS along `lambdas`, warm-started. Throws ConvergenceError at
/// the first grid point that fails.
GlmPathFit glm_fit_path(const DesignMatrix& design, const VectorXd& y, const GlmFamily& family,
                        const PenaltyKind& kind, const VectorXd& lambdas, const GlmOptions& options = {});

GlmPartialPathFit try_glm_fit_path(const DesignMatrix& design, const VectorXd& y, const GlmFamily& family,
                                   const PenaltyKind& kind, const VectorXd& lambdas,
                                   const GlmOptions& options = {});

/// theta* = X_a beta* solving X_a'(mu - b'(X_a beta)) = 0 on the support
/// columns (plus intercept when the design has one).
VectorXd pseudo_true_theta(const DesignMatrix& design, const VectorXd& mu, const GlmFamily& family,
                           const std::vector<Index>& support);

}  // namespace penreg
