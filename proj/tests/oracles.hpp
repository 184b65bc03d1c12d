#pragma once

// Reference computations that share no code with the library: brute-force
// minimizers, quadrature and a plain Newton MLE.

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// SCAD penalty written directly from its piecewise definition; a <= 0 means L1.
inline double penalty(double a, double lambda, double beta)
{
    const double t = std::abs(beta);
    if (a <= 0.0) return lambda * t;
    if (t <= lambda) return lambda * t;
    if (t <= a * lambda) return (2.0 * a * lambda * t - t * t - lambda * lambda) / (2.0 * (a - 1.0));
    return lambda * lambda * (a + 1.0) / 2.0;
}

/// Composite Simpson rule on [lo, hi] with `panels` (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels)
{
    const double h = (hi - lo) / panels;
    double sum = f(lo) + f(hi);
    for (int k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
    return sum * h / 3.0;
}

/// Grid minimum of f over [lo, hi] with the given step.
inline double grid_argmin_1d(const std::function<double(double)>& f, double lo, double hi, double step)
{
    double best = lo;
    double best_value = f(lo);
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 0.5));
    for (long k = 1; k <= count; ++k) {
        const double x = lo + static_cast<double>(k) * step;
        const double v = f(x);
        if (v < best_value) {
            best_value = v;
            best = x;
        }
    }
    return best;
}

/// Centers each column and scales it by its population standard deviation.
inline MatrixXd standardize_columns(const MatrixXd& x)
{
    MatrixXd out = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        out.col(j).array() -= out.col(j).mean();
        out.col(j) /= std::sqrt(out.col(j).squaredNorm() / static_cast<double>(x.rows()));
    }
    return out;
}

/// (1/2n)||yc - Xs b||^2 + sum p(|b_j|) for two standardized columns, expanded
/// through the Gram matrix so each evaluation is O(1).
struct Objective2d
{
    double yy;
    Eigen::Vector2d xy;
    Eigen::Matrix2d gram;
    double n;
    double a;
    double lambda;

    Objective2d(const MatrixXd& xs, const VectorXd& y, double a_, double lambda_)
        : n(static_cast<double>(xs.rows())), a(a_), lambda(lambda_)
    {
        const VectorXd yc = y.array() - y.mean();
        yy = yc.squaredNorm();
        xy = xs.transpose() * yc;
        gram = xs.transpose() * xs;
    }

    double operator()(double b1, double b2) const
    {
        const double quad = gram(0, 0) * b1 * b1 + 2.0 * gram(0, 1) * b1 * b2 + gram(1, 1) * b2 * b2;
        const double rss = yy - 2.0 * (xy(0) * b1 + xy(1) * b2) + quad;
        return rss / (2.0 * n) + penalty(a, lambda, b1) + penalty(a, lambda, b2);
    }
};

/// Grid minimizer over [-5, 5]^2: a 1e-2 pass, then a 1e-3 pass over the
/// +-0.05 window around the coarse winner. Valid for convex objectives.
inline std::pair<double, double> brute_force_2d(const Objective2d& f)
{
    auto search = [&](double lo1, double hi1, double lo2, double hi2, double step) {
        std::pair<double, double> best{lo1, lo2};
        double best_value = std::numeric_limits<double>::infinity();
        const auto n1 = static_cast<long>(std::floor((hi1 - lo1) / step + 0.5));
        const auto n2 = static_cast<long>(std::floor((hi2 - lo2) / step + 0.5));
        for (long i = 0; i <= n1; ++i) {
            const double b1 = lo1 + static_cast<double>(i) * step;
            for (long k = 0; k <= n2; ++k) {
                const double b2 = lo2 + static_cast<double>(k) * step;
                const double v = f(b1, b2);
                if (v < best_value) {
                    best_value = v;
                    best = {b1, b2};
                }
            }
        }
        return best;
    };
    const auto coarse = search(-5.0, 5.0, -5.0, 5.0, 1e-2);
    return search(coarse.first - 0.05, coarse.first + 0.05, coarse.second - 0.05, coarse.second + 0.05, 1e-3);
}

/// Unpenalized GLM MLE on [1, X] by Newton-Raphson. `mean`/`variance` are
/// b' and b''.
inline VectorXd newton_mle(const MatrixXd& x, const VectorXd& y, const std::function<double(double)>& mean,
                           const std::function<double(double)>& variance)
{
    const Eigen::Index n = x.rows();
    MatrixXd a(n, x.cols() + 1);
    a.col(0).setOnes();
    a.rightCols(x.cols()) = x;
    VectorXd beta = VectorXd::Zero(a.cols());
    for (int it = 0; it < 100; ++it) {
        const VectorXd eta = a * beta;
        VectorXd score_w(n), w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            score_w(i) = y(i) - mean(eta(i));
            w(i) = variance(eta(i));
        }
        const VectorXd score = a.transpose() * score_w;
        const MatrixXd info = a.transpose() * w.asDiagonal() * a;
        const VectorXd step = info.ldlt().solve(score);
        beta += step;
        if (step.cwiseAbs().maxCoeff() < 1e-14) break;
    }
    return beta;
}

}  // namespace oracle
