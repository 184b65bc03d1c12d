#include "penreg/loss.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "penreg/error.hpp"

namespace penreg {

double l2_loss(const VectorXd& mu, const VectorXd& mu_hat)
{
    if (mu.size() != mu_hat.size() || mu.size() == 0) throw InvalidInput("l2_loss: length mismatch");
    return (mu - mu_hat).squaredNorm() / static_cast<double>(mu.size());
}

double kl_loss(const VectorXd& mu, const VectorXd& theta0, const VectorXd& theta_hat, const GlmFamily& family)
{
    const Index n = mu.size();
    if (theta0.size() != n || theta_hat.size() != n || n == 0) throw InvalidInput("kl_loss: length mismatch");
    for (Index i = 0; i < n; ++i) {
        const double expected = family.b_prime(theta0(i));
        if (std::abs(mu(i) - expected) > 1e-10 * std::max(1.0, std::abs(expected))) {
            throw InvalidInput(fmt::format("kl_loss: mu[{}] = {} is not b'(theta0) = {}", i, mu(i), expected));
        }
    }
    if (family.type() == GlmFamily::Type::poisson && theta_hat.cwiseAbs().maxCoeff() > theta_clamp) {
        return std::numeric_limits<double>::infinity();
    }
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        total += mu(i) * (theta0(i) - theta_hat(i)) + family.b(theta_hat(i)) - family.b(theta0(i));
    }
    // Convexity makes every term nonnegative; clip rounding noise.
    return std::max(0.0, 2.0 * total / static_cast<double>(n));
}

double holdout_l2_loss(const DesignMatrix& design_new, const VectorXd& coefficients, const VectorXd& mu_new)
{
    return l2_loss(mu_new, design_new.predict(coefficients));
}

double efficiency(const VectorXd& losses, std::size_t selected_index)
{
    if (losses.size() == 0 || static_cast<Index>(selected_index) >= losses.size()) {
        throw InvalidInput("efficiency: selected index out of range");
    }
    const double min_loss = losses.minCoeff();
    const double selected = losses(static_cast<Index>(selected_index));
    if (min_loss == 0.0) return selected == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return selected / min_loss;
}

LossReport loss_report(VectorXd losses, const std::vector<std::size_t>& selected_indices)
{
    LossReport report;
    report.losses = std::move(losses);
    Index best = 0;
    for (Index g = 1; g < report.losses.size(); ++g) {
        if (report.losses(g) < report.losses(best)) best = g;
    }
    report.oracle_index = static_cast<std::size_t>(best);
    report.min_loss = report.losses(best);
    for (std::size_t index : selected_indices) {
        report.selected.push_back({index, report.losses(static_cast<Index>(index)), efficiency(report.losses, index)});
    }
    return report;
}

}  // namespace penreg
