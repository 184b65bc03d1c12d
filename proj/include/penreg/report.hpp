#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "penreg/harness.hpp"

namespace penreg {

/// Identity of a scenario as recorded in its manifest.
struct ScenarioKey
{
    std::string design;
    Index n = 0;
    double c = 0.0;
    std::string penalty;
};

struct ScenarioRecords
{
    ScenarioKey key;
    int reps = 0;
    std::vector<RecordRow> rows;
};

inline constexpr std::string_view records_header = "rep,selector,lambda,df,loss,efficiency,flag";

std::string records_csv(const std::vector<RecordRow>& rows);

/// Parses records.csv text. Throws InvalidInput on an empty file, a wrong
/// header or a malformed line.
std::vector<RecordRow> parse_records(std::string_view text);

/// The rendered report files, each a complete file body.
struct ReportTables
{
    std::string summary_csv;
    std::string summary_table;
    std::string df_quantiles_csv;
    std::string oracle_csv;
};

/// Aggregates scenarios in canonical order (design, penalty, n, c) so the
/// output does not depend on the order they were found in.
ReportTables build_report(std::vector<ScenarioRecords> scenarios);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view body);

void write_report(const std::filesystem::path& dir, const ReportTables& tables);

/// Loads records.csv plus the sibling manifest.txt when present. Without a
/// manifest the key is left blank.
ScenarioRecords load_scenario_records(const std::filesystem::path& records_path);

/// `path` is either a records.csv file or a directory searched recursively
/// for records.csv files.
std::vector<ScenarioRecords> load_records_tree(const std::filesystem::path& path);

}  // namespace penreg
