#include "penreg/penalties.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "penreg/error.hpp"

namespace penreg {

PenaltyKind PenaltyKind::scad(double a)
{
    if (!(a > 2.0) || !std::isfinite(a)) {
        throw InvalidInput(fmt::format("SCAD requires a > 2, got {}", a));
    }
    return PenaltyKind(Type::scad, a);
}

std::string PenaltyKind::describe() const
{
    if (type_ == Type::l1) return "l1";
    return fmt::format("scad(a={:.6g})", a_);
}

double soft_threshold(double z, double lambda)
{
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

double penalty_derivative(const PenaltyKind& kind, double lambda, double beta)
{
    if (kind.type() == PenaltyKind::Type::l1) return lambda;
    if (beta <= lambda) return lambda;
    const double a = kind.a();
    return std::max(a * lambda - beta, 0.0) / (a - 1.0);
}

double penalty_value(const PenaltyKind& kind, double lambda, double beta)
{
    const double b = std::abs(beta);
    if (kind.type() == PenaltyKind::Type::l1) return lambda * b;
    const double a = kind.a();
    if (b <= lambda) return lambda * b;
    if (b <= a * lambda) return (2.0 * a * lambda * b - b * b - lambda * lambda) / (2.0 * (a - 1.0));
    return lambda * lambda * (a + 1.0) / 2.0;
}

double univariate_update(double z, double lambda, const PenaltyKind& kind)
{
    if (kind.type() == PenaltyKind::Type::l1) return soft_threshold(z, lambda);
    const double a = kind.a();
    const double az = std::abs(z);
    if (az <= 2.0 * lambda) return soft_threshold(z, lambda);
    if (az <= a * lambda) {
        const double s = std::copysign(1.0, z);
        return s * std::max(az - a * lambda / (a - 1.0), 0.0) / (1.0 - 1.0 / (a - 1.0));
    }
    return z;
}

namespace {

// Non-convex coordinate (v <= 1/(a-1)): compare every stationary point and
// region boundary on the half line matching sign(z).
double scad_enumerate(double z, double v, double lambda, double a)
{
    const double az = std::abs(z);
    auto objective = [&](double b) {
        return 0.5 * v * b * b - az * b + penalty_value(PenaltyKind::scad(a), lambda, b);
    };
    std::array<double, 6> candidates{0.0, lambda, a * lambda, -1.0, -1.0, -1.0};
    const double b1 = (az - lambda) / v;
    if (b1 >= 0.0 && b1 <= lambda) candidates[3] = b1;
    const double denom = v - 1.0 / (a - 1.0);
    if (denom > 0.0) {
        const double b2 = (az - a * lambda / (a - 1.0)) / denom;
        if (b2 > lambda && b2 <= a * lambda) candidates[4] = b2;
    }
    const double b3 = az / v;
    if (b3 > a * lambda) candidates[5] = b3;

    double best = 0.0;
    double best_value = objective(0.0);
    for (double b : candidates) {
        if (b < 0.0) continue;
        const double value = objective(b);
        if (value < best_value) {
            best = b;
            best_value = value;
        }
    }
    return std::copysign(best, z);
}

}  // namespace

double weighted_univariate_update(double z, double v, double lambda, const PenaltyKind& kind)
{
    if (kind.type() == PenaltyKind::Type::l1) return soft_threshold(z, lambda) / v;
    const double a = kind.a();
    if (v == 1.0) return univariate_update(z, lambda, kind);
    if (v <= 1.0 / (a - 1.0)) return scad_enumerate(z, v, lambda, a);

    const double az = std::abs(z);
    const double s = std::copysign(1.0, z);
    if (az <= lambda) return 0.0;
    if (az <= lambda * (1.0 + v)) return s * (az - lambda) / v;
    if (az <= v * a * lambda) return s * (az - a * lambda / (a - 1.0)) / (v - 1.0 / (a - 1.0));
    return z / v;
}

double convex_scad_a(double gram_min_eigenvalue)
{
    if (!(gram_min_eigenvalue > 0.0)) {
        throw RankDeficientError(fmt::format(
            "design Gram matrix is rank deficient (minimum eigenvalue {:.6g})", gram_min_eigenvalue));
    }
    return std::max(default_scad_a, 1.0 + 1.0 / gram_min_eigenvalue);
}

}  // namespace penreg
