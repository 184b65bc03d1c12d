#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penreg/design.hpp"
#include "penreg/glm.hpp"
#include "penreg/linear_solver.hpp"
#include "penreg/penalties.hpp"

namespace penreg {

enum class SelectorId { cv10, aic, aicc, bic, cp, gcv, gamma };

inline constexpr SelectorId all_selectors[] = {SelectorId::cv10, SelectorId::aic, SelectorId::aicc,
                                               SelectorId::bic,  SelectorId::cp,  SelectorId::gcv,
                                               SelectorId::gamma};

std::string_view selector_name(SelectorId id);
/// Throws InvalidInput on an unknown name.
SelectorId parse_selector(std::string_view name);
/// True for the criteria defined only for the Gaussian working likelihood.
bool gaussian_only(SelectorId id);

struct SelectorScore
{
    std::string name;
    VectorXd values;
    std::size_t selected_index = 0;
    double selected_lambda = 0.0;
    int selected_df = 0;
};

// Gaussian criteria. Degenerate inputs (zero residual variance, df past the
// denominator guard) score +infinity.
double aic_gauss(double sigma2_hat, int df, int n);
double aicc_gauss(double sigma2_hat, int df, int n);
double bic_gauss(double sigma2_hat, int df, int n);
double gcv(double sigma2_hat, int df, int n);
double cp(double sigma2_hat, int df, int n, double sigma_tilde2);
double gamma_n(double sigma2_hat, int df, int n);

// Likelihood versions for dispersion-free GLMs.
double aic_glm(double loglik, int df, int n);
double aicc_glm(double loglik, int df, int n);
double bic_glm(double loglik, int df, int n);

/// Index of the minimum; ties go to the smallest index (largest lambda).
/// Throws InvalidInput("no admissible lambda") when every value is +inf or NaN.
std::size_t select(const VectorXd& values);

/// Criterion curve for an information criterion over a Gaussian path.
/// `sigma_tilde2` is required for Cp. Throws for cv10.
SelectorScore score_gaussian_path(const PathFit& fit, SelectorId id, int n,
                                  std::optional<double> sigma_tilde2 = std::nullopt);

/// Criterion curve for aic/aicc/bic over a GLM path.
SelectorScore score_glm_path(const GlmPathFit& fit, SelectorId id, int n);

struct CvOptions
{
    int folds = 10;
    std::uint64_t seed = 1;
    PathOptions gaussian;
    GlmOptions glm;
};

/// Fold assignment for n observations: a seeded permutation dealt round-robin,
/// so fold sizes differ by at most one.
std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed);

/// k-fold cross-validation over a fixed lambda grid. Without a family the
/// held-out score is mean squared prediction error; with one it is the
/// held-out -(2/m) sum(y theta - b(theta)). A fold that fails past some grid
/// index scores +inf from there on.
SelectorScore kfold_cv(const DesignMatrix& design, const VectorXd& y, const PenaltyKind& kind,
                       const VectorXd& lambdas, const std::optional<GlmFamily>& family,
                       const CvOptions& options, const std::vector<int>& df_on_full_path = {});

}  // namespace penreg
