#pragma once

#include <cstddef>
#include <vector>

#include "penreg/design.hpp"
#include "penreg/glm.hpp"

namespace penreg {

/// ||mu - mu_hat||^2 / n, measured against the true mean.
double l2_loss(const VectorXd& mu, const VectorXd& mu_hat);

/// (2/n) sum_i [mu_i (theta0_i - theta_hat_i) + b(theta_hat_i) - b(theta0_i)].
/// Requires mu_i = b'(theta0_i). Returns +inf when a Poisson theta_hat lies
/// outside the solver clamp.
double kl_loss(const VectorXd& mu, const VectorXd& theta0, const VectorXd& theta_hat, const GlmFamily& family);

/// L2 loss of intercept + X_new * slopes against the hold-out means.
double holdout_l2_loss(const DesignMatrix& design_new, const VectorXd& coefficients, const VectorXd& mu_new);

/// losses[selected] / min(losses). A zero minimum gives 1 when the selected
/// loss is also zero and +inf otherwise.
double efficiency(const VectorXd& losses, std::size_t selected_index);

struct SelectedLoss
{
    std::size_t index = 0;
    double loss = 0.0;
    double efficiency = 1.0;
};

struct LossReport
{
    VectorXd losses;
    std::size_t oracle_index = 0;
    double min_loss = 0.0;
    std::vector<SelectedLoss> selected;
};

/// Oracle index (smallest on ties) plus loss/efficiency at each selection.
LossReport loss_report(VectorXd losses, const std::vector<std::size_t>& selected_indices);

}  // namespace penreg
