#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "ciforge/evaluation.hpp"

namespace ciforge {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::ordered_json estimate_to_json(const EstimateResult& result,
                                        const PredictionMatrix& pm);

/// Per-cell summaries, ranks and failure counts. Deterministic for a given BenchmarkSpec.
nlohmann::ordered_json benchmark_to_json(const BenchmarkReport& report);

/// Aligned text table: one row per cell, "inclusion (tightness)" per method,
/// `*` marking non-rejected inclusion, and an average-rank footer.
std::string format_benchmark_table(const BenchmarkReport& report);

/// Columns: alpha,beta,n,c,b,rep,method,ci_low,ci_high,point,truth,time_ms,status
/// time_ms is written as 0 unless include_times is set.
void write_run_log(std::ostream& out, const BenchmarkReport& report,
                   bool include_times);

nlohmann::ordered_json spec_to_json(const BenchmarkSpec& spec);
BenchmarkSpec spec_from_json(const nlohmann::json& doc);

void write_timing_csv(std::ostream& out, TimingAxis axis,
                      std::span<const TimingRow> rows);

}  // namespace ciforge
