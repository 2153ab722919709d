#pragma once

#include <string>
#include <utility>
#include <vector>

#include "v2xsim/engine.hpp"

namespace v2xsim {

struct ReportRow {
  std::string policy;
  double avg_prr = 0.0;
  double mean_switches = 0.0;
  double per = 0.0;
};

// Renders the policy comparison. Rows are sorted by descending PRR;
// percentages carry two decimals. Formats: "table", "csv", "json".
std::string render_report(std::vector<ReportRow> rows, const std::string& format);

std::vector<ReportRow> report_rows_from_json(const std::string& json_text);

// One JSON document per run, embedding the fully resolved configuration so
// the run can be reproduced from its own output.
std::string metrics_to_json(const RunMetrics& metrics, const ScenarioConfig& scenario,
                            const SimConfig& sim);

std::string sweep_to_csv(const SweepResult& sweep);
std::string cdf_to_csv(
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& curves);

// Writes via a temp file and rename so failures never leave partial output.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace v2xsim
