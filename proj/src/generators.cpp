#include "penreg/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "penreg/error.hpp"
#include "penreg/linear_solver.hpp"

namespace penreg {

Rng stream_rng(std::uint64_t base_seed, std::uint64_t rep_index, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(rep_index), static_cast<std::uint32_t>(rep_index >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

Index dimension_for(Index n, double c)
{
    if (n <= 0 || !(c > 0.0 && c < 1.0)) throw InvalidInput("dimension needs n > 0 and c in (0, 1)");
    return 2 * static_cast<Index>(std::floor(std::pow(static_cast<double>(n), c) / 2.0));
}

DesignMatrix trig_design(Index n, Index d)
{
    if (d <= 0 || d % 2 != 0) throw InvalidInput(fmt::format("trigonometric design needs even d > 0, got {}", d));
    if (d >= n) throw InvalidInput(fmt::format("trigonometric design needs d < n (d = {}, n = {})", d, n));
    const Index half = d / 2;
    MatrixXd x(n, d);
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(d));
    for (Index j = 1; j <= half; ++j) {
        for (Index i = 1; i <= n; ++i) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) * static_cast<double>(i)
                                 / static_cast<double>(n);
            x(i - 1, j - 1) = std::sin(angle);
            x(i - 1, half + j - 1) = std::cos(angle);
        }
    }
    for (Index j = 1; j <= half; ++j) names.push_back(fmt::format("sin{}", j));
    for (Index j = 1; j <= half; ++j) names.push_back(fmt::format("cos{}", j));
    return DesignMatrix(std::move(x), true, std::move(names));
}

VectorXd exponential_mean(Index n)
{
    VectorXd mu(n);
    for (Index i = 1; i <= n; ++i) mu(i - 1) = std::exp(4.0 * static_cast<double>(i) / static_cast<double>(n));
    return mu;
}

VectorXd gaussian_noise(Index n, double sigma2, Rng& rng)
{
    if (sigma2 < 0.0) throw InvalidInput("noise variance must be nonnegative");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(sigma2);
    VectorXd eps(n);
    for (Index i = 0; i < n; ++i) eps(i) = sd * normal(rng);
    return eps;
}

VectorXd poisson_draws(const VectorXd& mu, Rng& rng)
{
    VectorXd y(mu.size());
    for (Index i = 0; i < mu.size(); ++i) {
        std::poisson_distribution<long> poisson(mu(i));
        y(i) = static_cast<double>(poisson(rng));
    }
    return y;
}

GaussianData gen_exponential(Index n, double c, double sigma2, Rng& rng)
{
    GaussianData data{trig_design(n, dimension_for(n, c)), exponential_mean(n), {}};
    data.y = data.mu + gaussian_noise(n, sigma2, rng);
    return data;
}

OmittedDesign omitted_design(Index n, double c, double rho, std::uint64_t design_seed)
{
    if (!(rho > -1.0 && rho < 1.0)) throw InvalidInput("AR correlation rho must lie in (-1, 1)");
    const Index d = dimension_for(n, c);
    if (d < 2 || d >= n) throw InvalidInput(fmt::format("omitted-predictor design needs 2 <= d_n < n (d_n = {})", d));
    const Index m = std::max<Index>(d + 1, 13);

    MatrixXd sigma(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
    const Eigen::LLT<MatrixXd> chol(sigma);
    if (chol.info() != Eigen::Success) throw RankDeficientError("AR covariance is not positive definite");

    Rng rng(design_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    MatrixXd z(2 * n, m);
    for (Index i = 0; i < 2 * n; ++i) {
        for (Index j = 0; j < m; ++j) z(i, j) = normal(rng);
    }
    MatrixXd generated = z * chol.matrixL().transpose();

    const VectorXd mu_all = 3.0 * generated.col(0) + 1.5 * generated.col(1) + 2.0 * generated.col(9)
                            + 1.0 * generated.col(12);

    // Candidate columns: the first min(d_n + 1, m) generated columns, less x13.
    std::vector<Index> keep;
    std::vector<std::string> names;
    for (Index j = 0; j < std::min(d + 1, m); ++j) {
        if (j == 12) continue;
        keep.push_back(j);
        names.push_back(fmt::format("x{}", j + 1));
    }
    MatrixXd candidates(2 * n, static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) candidates.col(static_cast<Index>(k)) = generated.col(keep[k]);

    OmittedDesign out{DesignMatrix(candidates.topRows(n), true, names),
                      DesignMatrix(candidates.bottomRows(n), true, names), mu_all.head(n), mu_all.tail(n),
                      std::move(generated)};
    return out;
}

OmittedData gen_omitted(Index n, double c, double rho, double sigma2, std::uint64_t design_seed, Rng& rng)
{
    OmittedData data{omitted_design(n, c, rho, design_seed), {}};
    data.y_train = data.mu_train + gaussian_noise(n, sigma2, rng);
    return data;
}

VectorXd poisson_theta(Index n)
{
    VectorXd theta(n);
    for (Index i = 0; i < n; ++i) theta(i) = std::exp(-5.0 * static_cast<double>(i) / static_cast<double>(n));
    return theta;
}

PoissonData gen_poisson(Index n, double c, Rng& rng)
{
    PoissonData data{trig_design(n, dimension_for(n, c)), poisson_theta(n), {}, {}};
    data.mu = data.theta0.array().exp();
    data.y = poisson_draws(data.mu, rng);
    return data;
}

double projection_bias(const DesignMatrix& design, const VectorXd& mu)
{
    if (mu.size() != design.rows()) throw InvalidInput("projection_bias: mean length does not match design");
    return OlsProjector(design, all_columns(design)).residual(mu).squaredNorm();
}

}  // namespace penreg
