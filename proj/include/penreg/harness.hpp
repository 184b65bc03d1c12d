#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "penreg/generators.hpp"
#include "penreg/selectors.hpp"

namespace penreg {

enum class DesignKind { exponential, omitted_predictor, poisson_trig };
enum class PenaltyMode { l1, scad_auto, scad_fixed };

std::string_view design_name(DesignKind kind);
DesignKind parse_design(std::string_view name);
/// "l1", "scad", "scad37".
std::string_view penalty_mode_name(PenaltyMode mode);
PenaltyMode parse_penalty_mode(std::string_view name);

/// One Monte Carlo design.
struct Scenario
{
    DesignKind design = DesignKind::exponential;
    Index n = 100;
    double c = 0.3;
    double sigma2 = 100.0;
    double rho = 0.0;
    PenaltyMode penalty = PenaltyMode::l1;
    std::vector<SelectorId> selectors{SelectorId::aic, SelectorId::aicc, SelectorId::bic};
    int reps = 200;
    std::uint64_t base_seed = 1;
    std::uint64_t design_seed = 1;
    int grid_size = 200;
    int cv_folds = 10;

    Index dimension() const { return dimension_for(n, c); }
    bool is_glm() const { return design == DesignKind::poisson_trig; }
    /// Throws InvalidInput describing the first problem found.
    void validate() const;
};

/// Ran to completion.
inline constexpr std::string_view flag_ok = "ok";
/// The realization's path could not be fitted.
inline constexpr std::string_view flag_failed = "failed";
/// Selector not computable for this run (Cp without a full-model variance).
inline constexpr std::string_view flag_unavailable = "unavailable";
/// Every lambda scored +inf.
inline constexpr std::string_view flag_no_admissible = "noadmissible";
/// Zero oracle loss with a nonzero selected loss.
inline constexpr std::string_view flag_infinite = "inf";

/// One (realization, selector) outcome. The oracle appears as selector
/// "oracle" with loss = min_loss and efficiency 1.
struct RecordRow
{
    int rep = 0;
    std::string selector;
    double lambda = 0.0;
    int df = 0;
    double loss = 0.0;
    double efficiency = 1.0;
    std::string flag{flag_ok};

    bool usable() const { return flag == flag_ok || flag == flag_infinite; }
};

inline constexpr std::string_view oracle_name = "oracle";

struct RealizationRecord
{
    int rep = 0;
    bool failed = false;
    std::string failure;
    /// One row per selector, in scenario order, then the oracle row.
    std::vector<RecordRow> rows;
    std::size_t sweeps = 0;
    std::size_t monotonicity_violations = 0;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
};

struct Quantiles
{
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

struct SelectorSummary
{
    std::string selector;
    double median_efficiency = 0.0;
    double median_loss = 0.0;
    Quantiles df;
    int used = 0;
    int failures = 0;
};

/// Medians over usable rows only; the oracle is summarized like a selector.
struct ScenarioSummary
{
    std::vector<SelectorSummary> selectors;
    int failed_realizations = 0;

    const SelectorSummary& get(std::string_view selector) const;
};

struct ScenarioRun
{
    Scenario scenario;
    Index dimension = 0;
    /// Columns actually offered to the solver (differs from d_n for the
    /// omitted-predictor design when d_n + 1 < 13).
    Index candidate_columns = 0;
    std::optional<double> scad_a;
    std::vector<RealizationRecord> records;
    ScenarioSummary summary;

    std::vector<RecordRow> rows() const;
};

/// Raised when more than half of the realizations fail.
class ScenarioFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Average of the two central order statistics for even counts. Throws on
/// empty input.
double median(std::vector<double> values);

/// min, quartiles (linear interpolation between order statistics), max.
Quantiles quantiles(std::vector<double> values);

/// Aggregates rows in first-seen selector order.
ScenarioSummary summarize_rows(const std::vector<RecordRow>& rows);

/// Runs every realization. Results depend only on the scenario, never on
/// `workers`.
ScenarioRun run_scenario(const Scenario& scenario, int workers = 1);

}  // namespace penreg
