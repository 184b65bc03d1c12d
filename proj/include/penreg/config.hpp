#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "penreg/harness.hpp"

namespace penreg {

/// Everything a CLI run needs. Every field has a key in the flat
/// `key = value` config format; lists are comma separated.
struct RunConfig
{
    std::string command = "simulate";

    // simulate
    DesignKind design = DesignKind::exponential;
    std::vector<Index> n_values{100};
    std::vector<double> c_values{0.3};
    double sigma2 = 100.0;
    double rho = 0.0;
    std::vector<PenaltyMode> penalties{PenaltyMode::l1};
    std::vector<SelectorId> selectors{SelectorId::cv10, SelectorId::aic, SelectorId::aicc, SelectorId::bic,
                                      SelectorId::cp,   SelectorId::gcv, SelectorId::gamma};
    int reps = 200;
    std::uint64_t seed = 1;
    std::uint64_t design_seed = 1;
    int grid_size = 200;
    int cv_folds = 10;

    // fit
    std::string data_path;
    std::string target;

    // report
    std::string records_path;

    std::string output_dir = "out";
    int workers = 1;

    /// Cartesian product penalties x n x c, in that nesting order.
    std::vector<Scenario> scenarios() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses `key = value` lines over `base`. '#' starts a comment; blank lines
/// are ignored; keys prefixed "info." are informational and skipped.
/// Unknown keys and malformed values throw InvalidInput with the line number.
RunConfig parse_config(std::string_view text, RunConfig base = {});

RunConfig load_config(const std::string& path, RunConfig base = {});

/// Applies one key/value pair, as from a config line or a CLI flag.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Shortest decimal that parses back to the same double.
std::string exact_number(double value);

/// Six significant digits, '.' decimal separator, independent of locale.
std::string format_number(double value);

}  // namespace penreg
