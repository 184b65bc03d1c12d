#pragma once

#include <string>

namespace penreg {

/// Penalty family applied to every slope coefficient. SCAD carries its
/// concavity parameter `a`, which must exceed 2.
class PenaltyKind
{
public:
    enum class Type { l1, scad };

    static PenaltyKind l1() { return PenaltyKind(Type::l1, 0.0); }
    static PenaltyKind scad(double a);

    Type type() const { return type_; }
    bool is_scad() const { return type_ == Type::scad; }
    /// SCAD concavity; 0 for L1.
    double a() const { return a_; }

    std::string describe() const;

    friend bool operator==(const PenaltyKind&, const PenaltyKind&) = default;

private:
    PenaltyKind(Type t, double a) : type_(t), a_(a) {}

    Type type_;
    double a_;
};

/// p'_lambda(beta) for beta >= 0.
double penalty_derivative(const PenaltyKind& kind, double lambda, double beta);

/// p_lambda(|beta|), with p_lambda(0) = 0.
double penalty_value(const PenaltyKind& kind, double lambda, double beta);

/// argmin_b 0.5 * (z - b)^2 + p_lambda(|b|) for a unit-curvature coordinate.
double univariate_update(double z, double lambda, const PenaltyKind& kind);

/// argmin_b 0.5 * v * b^2 - z * b + p_lambda(|b|) for curvature v > 0.
/// Reduces to univariate_update(z, lambda, kind) when v == 1. Used by the
/// weighted inner solver of the GLM fit.
double weighted_univariate_update(double z, double v, double lambda, const PenaltyKind& kind);

double soft_threshold(double z, double lambda);

/// max(3.7, 1 + 1/c*) where c* is the smallest eigenvalue of X'X/n.
/// Throws RankDeficientError when c* <= 0.
double convex_scad_a(double gram_min_eigenvalue);

inline constexpr double default_scad_a = 3.7;

}  // namespace penreg
