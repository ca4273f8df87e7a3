#include "gradsat/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace gradsat {

double compute_par2(std::span<const RunRecord> records, double timeout) {
  if (records.empty()) throw std::invalid_argument("PAR2 of an empty record set");
  double total = 0.0;
  for (const auto& r : records) total += r.solved() ? r.seconds : 2.0 * timeout;
  return total / static_cast<double>(records.size());
}

std::vector<CurvePoint> cumulative_curve(std::span<const RunRecord> records,
                                         std::span<const double> grid) {
  std::vector<double> times;
  for (const auto& r : records)
    if (r.solved()) times.push_back(r.seconds);
  std::sort(times.begin(), times.end());
  std::vector<CurvePoint> curve;
  curve.reserve(grid.size());
  for (double limit : grid) {
    const auto count = std::upper_bound(times.begin(), times.end(), limit) - times.begin();
    curve.emplace_back(limit, static_cast<std::size_t>(count));
  }
  return curve;
}

namespace {

RunRecord run_one(const std::filesystem::path& file, const HybridConfig& config, double timeout,
                  const std::string& label) {
  RunRecord record;
  record.instance = file.filename().string();
  record.timeout = timeout;
  record.solver = label;
  const auto start = std::chrono::steady_clock::now();
  try {
    const CnfFormula formula = parse_dimacs_file(file.string());
    HybridConfig cfg = config;
    cfg.global_timeout = std::chrono::duration<double>(timeout);
    const HybridResult result = solve_hybrid(formula, cfg);
    record.status = result.outcome.status;
    record.gradient_seconds = result.timings.gradient_seconds;
    record.cdcl_seconds = result.timings.refinement_seconds;
  } catch (const std::exception&) {
    record.status = SolveStatus::Unknown;
  }
  record.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

void finalize(BenchmarkReport& report, double timeout, std::span<const double> grid) {
  report.par2 = compute_par2(report.records, timeout);
  report.cumulative_curve = cumulative_curve(report.records, grid);
}

}  // namespace

SuiteReport run_suite(const std::filesystem::path& directory, const SuiteConfig& config,
                      std::ostream* log) {
  if (!std::filesystem::is_directory(directory))
    throw std::invalid_argument("'" + directory.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".cnf") files.push_back(entry.path());
  if (files.empty()) throw std::invalid_argument("no .cnf files in '" + directory.string() + "'");
  std::sort(files.begin(), files.end());

  SuiteReport report;
  report.hybrid.solver = "hybrid";
  report.baseline.solver = "baseline";
  HybridConfig hybrid = config.hybrid;
  hybrid.mode = PipelineMode::Hybrid;
  HybridConfig baseline = config.hybrid;
  baseline.mode = PipelineMode::UnseededOnly;

  for (const auto& file : files) {
    report.hybrid.records.push_back(run_one(file, hybrid, config.timeout_seconds, "hybrid"));
    report.baseline.records.push_back(run_one(file, baseline, config.timeout_seconds, "baseline"));
    if (log) {
      const auto& h = report.hybrid.records.back();
      const auto& b = report.baseline.records.back();
      *log << "c " << h.instance << " hybrid=" << to_string(h.status) << ' ' << h.seconds
           << "s baseline=" << to_string(b.status) << ' ' << b.seconds << "s\n";
    }
  }

  const std::size_t points = std::max<std::size_t>(config.grid_points, 1);
  for (std::size_t i = 1; i <= points; ++i)
    report.grid.push_back(config.timeout_seconds * static_cast<double>(i) /
                          static_cast<double>(points));
  finalize(report.hybrid, config.timeout_seconds, report.grid);
  finalize(report.baseline, config.timeout_seconds, report.grid);

  if (config.json_out) {
    std::ofstream out(*config.json_out);
    out << to_json(report).dump(2) << '\n';
  }
  if (config.csv_out) {
    std::ofstream out(*config.csv_out);
    write_curves_csv(out, report);
  }
  return report;
}

nlohmann::json to_json(const BenchmarkReport& report) {
  using nlohmann::json;
  json records = json::array();
  for (const auto& r : report.records)
    records.push_back({{"instance", r.instance},
                       {"status", std::string(to_string(r.status))},
                       {"seconds", r.seconds},
                       {"timeout", r.timeout},
                       {"gradient_seconds", r.gradient_seconds},
                       {"cdcl_seconds", r.cdcl_seconds},
                       {"solver", r.solver}});
  json curve = json::array();
  for (const auto& [limit, count] : report.cumulative_curve) curve.push_back({limit, count});
  return {{"solver", report.solver}, {"par2", report.par2}, {"records", records},
          {"cumulative_curve", curve}};
}

nlohmann::json to_json(const SuiteReport& report) {
  return {{"schema", 1}, {"hybrid", to_json(report.hybrid)}, {"baseline", to_json(report.baseline)}};
}

void write_curves_csv(std::ostream& out, const SuiteReport& report) {
  out << "limit,solved_hybrid,solved_baseline\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i)
    out << report.grid[i] << ',' << report.hybrid.cumulative_curve[i].second << ','
        << report.baseline.cumulative_curve[i].second << '\n';
}

}  // namespace gradsat
