#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "penreg/config.hpp"

namespace penreg {

/// A numeric table read from CSV with a header row.
struct CsvTable
{
    std::vector<std::string> header;
    MatrixXd values;

    /// Index of the named column; throws InvalidInput naming it if absent.
    Index column(const std::string& name) const;
};

/// Throws InvalidInput naming the row and column of the first bad cell.
CsvTable parse_numeric_csv(std::string_view text);
CsvTable read_numeric_csv(const std::filesystem::path& path);

/// One selector's choice on a real-data path.
struct SelectionRow
{
    std::string selector;
    std::string flag{flag_ok};
    double lambda = 0.0;
    int df = 0;
    /// [intercept, slopes...] on the original scale; NaN when not available.
    VectorXd coefficients;
};

struct PenaltyAnalysis
{
    PenaltyMode mode = PenaltyMode::l1;
    std::optional<double> scad_a;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    /// Selectors in the requested order; cv10 appears twice, as cv10_run1
    /// (seed) and cv10_run2 (seed + 1).
    std::vector<SelectionRow> rows;
};

/// Fits the penalty's path on the full data and applies every selector.
PenaltyAnalysis analyze_penalty(const DesignMatrix& design, const VectorXd& y, PenaltyMode mode,
                                const std::vector<SelectorId>& selectors, std::uint64_t seed, int folds = 10,
                                int grid_size = 200);

void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_fit(const RunConfig& config, std::ostream& log);
void cmd_report(const RunConfig& config, std::ostream& log);

/// Full command line handling. Returns the process exit status: 0 when every
/// requested artifact was written, 1 on a runtime error, 2 on a usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace penreg
