#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "penreg/design.hpp"
#include "penreg/penalties.hpp"

namespace penreg {

/// Penalized least-squares fits along a decreasing lambda grid.
///
/// Row g of `coefficients` is [intercept, slopes...] on the original scale.
/// The objective minimized at each grid point is
///   (1/2n) ||y - b0 - Xs b||^2 + sum_j p_lambda(|b_j|)
/// on the standardized columns Xs; `objective` records its value at
/// convergence.
struct PathFit
{
    VectorXd lambdas;
    MatrixXd coefficients;
    std::vector<int> df;
    VectorXd sigma2_hat;
    VectorXd objective;
    PenaltyKind kind = PenaltyKind::l1();
    bool intercept = true;

    std::size_t sweeps = 0;
    /// Sweeps where the objective rose by more than rounding slack.
    std::size_t monotonicity_violations = 0;

    std::size_t size() const { return static_cast<std::size_t>(lambdas.size()); }
};

struct PathOptions
{
    double tol = 1e-8;
    int max_iter = 10000;
    /// SCAD with a below the convexity bound is rejected unless set.
    bool allow_nonconvex = false;
};

/// A path that may have stopped early. `fit` holds the grid points solved
/// before the failure; `failed_at` is the first index that did not converge.
struct PartialPathFit
{
    PathFit fit;
    std::optional<std::size_t> failed_at;
};

/// Lambda grid of `count` values: the first half log-spaced from lambda_max
/// down to sqrt(lambda_max * lambda_min), the second half equally spaced down
/// to lambda_min = min_ratio * lambda_max.
VectorXd lambda_grid(const DesignMatrix& design, const VectorXd& y, std::size_t count = 200,
                     double min_ratio = 1e-4);

/// Same shape, from explicit endpoints.
VectorXd lambda_grid_between(double lambda_max, double lambda_min, std::size_t count);

/// max_j |<x_j, y - ybar>| / n on the standardized columns.
double gaussian_lambda_max(const DesignMatrix& design, const VectorXd& y);

/// Cyclic coordinate descent with warm starts. Throws ConvergenceError on the
/// first grid point that exceeds max_iter sweeps.
PathFit fit_path(const DesignMatrix& design, const VectorXd& y, const PenaltyKind& kind,
                 const VectorXd& lambdas, const PathOptions& options = {});

PartialPathFit try_fit_path(const DesignMatrix& design, const VectorXd& y, const PenaltyKind& kind,
                            const VectorXd& lambdas, const PathOptions& options = {});

/// Least squares on [1, X_support] (intercept only when the design has one).
struct OlsFit
{
    /// Length d + 1, zero outside the support.
    VectorXd coefficients;
    double rss = 0.0;
};

/// Exact least squares on a fixed column subset, factorized once so that
/// many responses can be projected cheaply.
class OlsProjector
{
public:
    OlsProjector(const DesignMatrix& design, std::vector<Index> support);

    OlsFit fit(const VectorXd& y) const;
    VectorXd residual(const VectorXd& y) const;
    Index columns() const { return basis_.cols(); }

private:
    Index d_;
    bool intercept_;
    std::vector<Index> support_;
    MatrixXd basis_;
    Eigen::ColPivHouseholderQR<MatrixXd> qr_;
};

OlsFit ols_refit(const DesignMatrix& design, const std::vector<Index>& support, const VectorXd& y);

/// Full-model residual variance rss / (n - d - 1).
double sigma_tilde(const DesignMatrix& design, const VectorXd& y);

std::vector<Index> all_columns(const DesignMatrix& design);

}  // namespace penreg
