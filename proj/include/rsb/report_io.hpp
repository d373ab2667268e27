#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rsb/experiments.hpp"
#include "rsb/selection.hpp"

namespace rsb {

using Json = nlohmann::json;

// Alternatives and scenarios are 1-based in all serialized output.
Json to_json(const SelectionOutcome& o);
Json to_json(const PcsEstimate& e);
Json to_json(const MeanCI& ci);
Json to_json(const ProportionCI& ci);
Json to_json(const AmbiguitySet& set);
Json to_json(const QueueStudyReport& r);
Json to_json(const QueuePcsReport& r);
Json to_json(const ScheduleStudyReport& r);

// FNV-1a (64-bit) over the compact dump of `config`, as 16 hex digits.
// Object keys are sorted, so equal configs hash equally.
std::string config_hash(const Json& config);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable bench_csv(const std::vector<BenchRow>& rows);
CsvTable rules_csv(const std::vector<RuleRatioRow>& rows);
CsvTable queue_csv(const QueueStudyReport& r);
CsvTable queue_pcs_csv(const QueuePcsReport& r);
CsvTable schedule_csv(const ScheduleStudyReport& r);

std::string format_csv(const CsvTable& t);

struct WrittenReport {
    std::string json_path;
    std::string csv_path;
};

// Writes <dir>/<stem>_<hash>.json and .csv. The JSON carries {"config",
// "config_hash", "report"}.
WrittenReport write_report(const std::string& dir, const std::string& stem, const Json& config, const Json& report,
                           const CsvTable& csv);

}  // namespace rsb
