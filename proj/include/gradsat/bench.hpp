#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gradsat/orchestrator.hpp"
#include "gradsat/solution_io.hpp"

namespace gradsat {

struct RunRecord {
  std::string instance;
  SolveStatus status = SolveStatus::Unknown;
  double seconds = 0.0;
  double timeout = 0.0;
  double gradient_seconds = 0.0;
  double cdcl_seconds = 0.0;
  std::string solver;

  bool solved() const {
    return (status == SolveStatus::Sat || status == SolveStatus::Unsat) && seconds <= timeout;
  }
};

using CurvePoint = std::pair<double, std::size_t>;

struct BenchmarkReport {
  std::string solver;
  std::vector<RunRecord> records;
  double par2 = 0.0;
  std::vector<CurvePoint> cumulative_curve;
};

// Penalized average runtime: solved instances count their runtime, unsolved
// ones twice the timeout. Throws on an empty record list.
double compute_par2(std::span<const RunRecord> records, double timeout);

// Solved instances with runtime <= limit, for each limit of an ascending grid.
std::vector<CurvePoint> cumulative_curve(std::span<const RunRecord> records,
                                         std::span<const double> grid);

struct SuiteConfig {
  HybridConfig hybrid;  // baseline runs reuse it in unseeded-only mode
  double timeout_seconds = 60.0;
  std::size_t grid_points = 50;
  std::optional<std::filesystem::path> json_out;
  std::optional<std::filesystem::path> csv_out;
};

struct SuiteReport {
  BenchmarkReport hybrid;
  BenchmarkReport baseline;
  std::vector<double> grid;
};

// Runs every `.cnf` file in `directory` (sorted by name) through the hybrid
// solver and the unseeded baseline with the same timeout.
SuiteReport run_suite(const std::filesystem::path& directory, const SuiteConfig& config,
                      std::ostream* log = nullptr);

nlohmann::json to_json(const BenchmarkReport& report);
nlohmann::json to_json(const SuiteReport& report);

// `limit,solved_hybrid,solved_baseline`
void write_curves_csv(std::ostream& out, const SuiteReport& report);

}  // namespace gradsat
