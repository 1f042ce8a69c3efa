#include "ciforge/report.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "ciforge/csv_io.hpp"
#include "ciforge/errors.hpp"

namespace ciforge {

using nlohmann::ordered_json;

ordered_json estimate_to_json(const EstimateResult& result, const PredictionMatrix& pm) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["method"] = std::string(to_string(result.method));
  doc["metric"] = std::string(result.config.metric.name());
  doc["winner_index"] = result.winner;
  doc["point_estimate"] = result.point_estimate;
  doc["ci_low"] = result.ci_low;
  doc["ci_high"] = result.ci_high;
  doc["coverage"] = result.config.coverage;
  doc["sided"] = std::string(to_string(result.config.sided));
  doc["B"] = result.config.bootstraps;
  doc["seed"] = result.config.seed;
  doc["n"] = pm.samples();
  doc["c"] = pm.configs();
  doc["k"] = pm.folds();
  doc["attempts"] = result.attempts;
  return doc;
}

namespace {

ordered_json scenario_to_json(const SimScenario& s) {
  ordered_json doc;
  doc["n"] = s.samples;
  doc["configs"] = s.configs;
  doc["balance"] = s.balance;
  doc["alpha"] = s.alpha;
  doc["beta"] = s.beta;
  return doc;
}

ordered_json summary_to_json(const MethodSummary& m) {
  ordered_json doc;
  doc["method"] = std::string(to_string(m.method));
  doc["inclusion"] = m.inclusion;
  doc["mean_tightness"] = m.mean_tightness;
  doc["n_runs"] = m.n_runs;
  doc["failures"] = m.failures;
  doc["verdict"] = std::string(to_string(m.verdict));
  doc["p_value"] = m.p_value;
  doc["rank"] = m.rank;
  doc["mean_point_bias"] = m.mean_point_bias;
  return doc;
}

}  // namespace

ordered_json spec_to_json(const BenchmarkSpec& spec) {
  ordered_json doc;
  doc["scenarios"] = ordered_json::array();
  for (const auto& s : spec.scenarios) doc["scenarios"].push_back(scenario_to_json(s));
  doc["methods"] = ordered_json::array();
  for (auto m : spec.methods) doc["methods"].push_back(std::string(to_string(m)));
  doc["reps"] = spec.repetitions;
  doc["coverage"] = spec.coverage;
  doc["bootstraps"] = spec.bootstraps;
  doc["sided"] = std::string(to_string(spec.sided));
  doc["seed"] = spec.seed;
  return doc;
}

BenchmarkSpec spec_from_json(const nlohmann::json& doc) {
  BenchmarkSpec spec;
  try {
    if (!doc.is_object()) throw InputError("benchmark spec must be a JSON object");
    if (!doc.contains("scenarios") || !doc["scenarios"].is_array()) {
      throw InputError("benchmark spec needs a 'scenarios' array");
    }
    for (const auto& s : doc["scenarios"]) {
      SimScenario sc;
      sc.samples = s.at("n").get<std::size_t>();
      sc.configs = s.at("configs").get<std::size_t>();
      sc.balance = s.at("balance").get<double>();
      sc.alpha = s.at("alpha").get<double>();
      sc.beta = s.at("beta").get<double>();
      spec.scenarios.push_back(sc);
    }
    if (doc.contains("methods")) {
      spec.methods.clear();
      for (const auto& m : doc["methods"]) spec.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (doc.contains("reps")) {
      const auto reps = doc["reps"].get<long long>();
      if (reps < 1) throw InputError("reps must be at least 1");
      spec.repetitions = static_cast<std::size_t>(reps);
    }
    if (doc.contains("coverage")) spec.coverage = doc["coverage"].get<double>();
    if (doc.contains("bootstraps")) spec.bootstraps = doc["bootstraps"].get<std::size_t>();
    if (doc.contains("sided")) spec.sided = parse_sidedness(doc["sided"].get<std::string>());
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("benchmark spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

ordered_json benchmark_to_json(const BenchmarkReport& report) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["spec"] = spec_to_json(report.spec);
  doc["cells"] = ordered_json::array();
  for (const auto& cell : report.cells) {
    ordered_json c;
    c["scenario"] = scenario_to_json(cell.scenario);
    c["scenario"]["seed"] = cell.scenario.seed;
    std::size_t min_folds = SIZE_MAX, max_folds = 0;
    for (const auto& r : cell.repetitions) {
      min_folds = std::min(min_folds, r.folds);
      max_folds = std::max(max_folds, r.folds);
    }
    c["folds_min"] = min_folds;
    c["folds_max"] = max_folds;
    c["mean_apparent_bias"] = cell.mean_apparent_bias;
    c["methods"] = ordered_json::array();
    for (const auto& m : cell.methods) c["methods"].push_back(summary_to_json(m));
    doc["cells"].push_back(std::move(c));
  }
  ordered_json ranks;
  for (std::size_t m = 0; m < report.spec.methods.size(); ++m) {
    ranks[std::string(to_string(report.spec.methods[m]))] = report.average_rank[m];
  }
  doc["average_rank"] = std::move(ranks);
  return doc;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string trim_number(double v) {
  std::string s = fixed(v, 3);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::string format_benchmark_table(const BenchmarkReport& report) {
  constexpr std::size_t kCol = 15;
  std::ostringstream out;
  out << pad("(alpha,beta)", 13) << pad("N", 7) << pad("C", 7) << pad("b", 6);
  for (auto m : report.spec.methods) out << pad(std::string(to_string(m)), kCol);
  out << "\n";

  for (const auto& cell : report.cells) {
    const auto& s = cell.scenario;
    out << pad("(" + trim_number(s.alpha) + "," + trim_number(s.beta) + ")", 13)
        << pad(std::to_string(s.samples), 7) << pad(std::to_string(s.configs), 7)
        << pad(trim_number(s.balance), 6);
    for (const auto& m : cell.methods) {
      std::string entry;
      if (m.n_runs == 0) {
        entry = "-";
      } else {
        entry = fixed(m.inclusion, 2) + " (" + fixed(m.mean_tightness, 2) + ")";
        entry += m.verdict == Verdict::Rejected ? " " : (m.verdict == Verdict::Insufficient ? "?" : "*");
      }
      out << pad(entry, kCol);
    }
    out << "\n";
  }
  out << pad("Avg Rnk", 33);
  for (double r : report.average_rank) out << pad(fixed(r, 2) + " ", kCol);
  out << "\n";
  out << "* inclusion not significantly below " << fixed(report.spec.coverage, 2)
      << " (exact binomial test, 5% level); ? fewer than " << kMinRunsForVerdict << " runs\n";

  bool any_failures = false;
  for (const auto& cell : report.cells) {
    for (const auto& m : cell.methods) any_failures |= m.failures > 0;
  }
  if (any_failures) {
    out << "failures:";
    for (std::size_t c = 0; c < report.cells.size(); ++c) {
      for (const auto& m : report.cells[c].methods) {
        if (m.failures) out << " cell" << c << "/" << to_string(m.method) << "=" << m.failures;
      }
    }
    out << "\n";
  }
  return out.str();
}

void write_run_log(std::ostream& out, const BenchmarkReport& report, bool include_times) {
  out << "alpha,beta,n,c,b,rep,method,ci_low,ci_high,point,truth,time_ms,status\n";
  for (const auto& cell : report.cells) {
    const auto& s = cell.scenario;
    for (std::size_t r = 0; r < cell.runs.size(); ++r) {
      for (const auto& run : cell.runs[r]) {
        const double ms =
            include_times ? std::chrono::duration<double, std::milli>(run.wall_time).count() : 0.0;
        const bool ok = run.status == RunStatus::Ok;
        out << format_double(s.alpha) << ',' << format_double(s.beta) << ',' << s.samples << ','
            << s.configs << ',' << format_double(s.balance) << ',' << cell.repetitions[r].rep << ','
            << to_string(run.method) << ',' << (ok ? format_double(run.ci_low) : "") << ','
            << (ok ? format_double(run.ci_high) : "") << ','
            << (ok ? format_double(run.point_estimate) : "") << ','
            << (ok ? format_double(run.true_perf) : "") << ',' << format_double(ms) << ','
            << (ok ? "ok" : "failed") << '\n';
      }
    }
  }
}

void write_timing_csv(std::ostream& out, TimingAxis axis, std::span<const TimingRow> rows) {
  out << "axis,value,bbc_total_ms,bbc_bootstrap_ms,bbcf_total_ms,bbcf_bootstrap_ms,"
         "total_ratio,bootstrap_ratio\n";
  for (const auto& r : rows) {
    out << to_string(axis) << ',' << r.value << ',' << format_double(r.bbc_total_ms) << ','
        << format_double(r.bbc_bootstrap_ms) << ',' << format_double(r.bbcf_total_ms) << ','
        << format_double(r.bbcf_bootstrap_ms) << ',' << format_double(r.total_ratio()) << ','
        << format_double(r.bootstrap_ratio()) << '\n';
  }
}

}  // namespace ciforge
