#pragma once

#include <cstdint>
#include <random>

#include "penreg/design.hpp"

namespace penreg {

using Rng = std::mt19937_64;

/// Independent generator for (base_seed, rep_index, stream). Stream 0 draws
/// responses; other streams are reserved for per-realization randomness such
/// as cross-validation folds.
Rng stream_rng(std::uint64_t base_seed, std::uint64_t rep_index, std::uint64_t stream = 0);

/// d_n = 2 floor(n^c / 2).
Index dimension_for(Index n, double c);

/// n x d matrix with columns sin(2 pi j i / n), j = 1..d/2, followed by
/// cos(2 pi j i / n), j = 1..d/2, for rows i = 1..n.
DesignMatrix trig_design(Index n, Index d);

struct GaussianData
{
    DesignMatrix design;
    VectorXd mu;
    VectorXd y;
};

/// mu_i = exp(4 i / n), i = 1..n.
VectorXd exponential_mean(Index n);

GaussianData gen_exponential(Index n, double c, double sigma2, Rng& rng);

/// Fixed part of the omitted-predictor design: drawn once from design_seed.
struct OmittedDesign
{
    DesignMatrix train;
    DesignMatrix holdout;
    VectorXd mu_train;
    VectorXd mu_holdout;
    /// All 2n x m generated columns, before column 13 is dropped.
    MatrixXd generated;
};

struct OmittedData : OmittedDesign
{
    VectorXd y_train;
};

/// Rows ~ N(0, Sigma) with Sigma_ij = rho^|i-j|; the mean is
/// 3 x1 + 1.5 x2 + 2 x10 + x13 and candidates never include x13.
OmittedDesign omitted_design(Index n, double c, double rho, std::uint64_t design_seed);

OmittedData gen_omitted(Index n, double c, double rho, double sigma2, std::uint64_t design_seed, Rng& rng);

struct PoissonData
{
    DesignMatrix design;
    VectorXd theta0;
    VectorXd mu;
    VectorXd y;
};

/// theta0_i = exp(-5 i / n), i = 0..n-1.
VectorXd poisson_theta(Index n);

PoissonData gen_poisson(Index n, double c, Rng& rng);

VectorXd gaussian_noise(Index n, double sigma2, Rng& rng);
VectorXd poisson_draws(const VectorXd& mu, Rng& rng);

/// ||mu - H mu||^2 for H the projection onto [1, X] (onto X alone when the
/// design has no intercept).
double projection_bias(const DesignMatrix& design, const VectorXd& mu);

}  // namespace penreg
