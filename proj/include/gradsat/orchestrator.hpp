#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "gradsat/cdcl.hpp"
#include "gradsat/cnf.hpp"
#include "gradsat/confidence.hpp"
#include "gradsat/grad_engine.hpp"

namespace gradsat {

enum class PipelineMode {
  Hybrid,        // gradient phase, then seeded workers plus one unseeded worker
  UnseededOnly,  // plain CDCL baseline on a single worker
  GradientOnly,  // gradient phase alone; can only answer SAT or UNKNOWN
};

struct HybridConfig {
  OptimizerConfig optimizer;  // optimizer.candidates is N
  std::size_t workers = 1;    // W
  Budget worker_budget;       // applied to every solve() call of a worker
  std::optional<std::chrono::duration<double>> global_timeout;
  std::uint64_t seed = 0;
  PipelineMode mode = PipelineMode::Hybrid;
  // Seeded workers start with the saved phases of their source column.
  bool phase_from_seed = true;
  // On UNSAT-under-assumptions keep the first half of the seeds and retry.
  bool halve_refuted_seeds = true;
  ConfidenceSignal confidence_signal = ConfidenceSignal::VariableGradient;

  void validate() const;
};

struct WorkerPlan {
  std::size_t worker = 0;
  std::optional<std::size_t> partial;  // index into the partial list
  std::uint64_t heuristic_seed = 0;    // 0 keeps the default decision order
};

// Worker 0 unseeded; workers 1.. take partials in priority order; surplus
// workers run unseeded with distinct heuristic seeds.
std::vector<WorkerPlan> dispatch_plan(std::span<const PartialAssignment> partials,
                                      std::size_t workers, std::uint64_t seed = 0);

struct WorkerReport {
  std::size_t id = 0;
  std::optional<std::size_t> source_column;
  std::size_t initial_assumptions = 0;
  std::size_t final_assumptions = 0;
  std::uint32_t relaunches = 0;
  std::uint64_t heuristic_seed = 0;
  SolveStatus status = SolveStatus::Unknown;
  SolveStats stats;
};

struct PhaseTimings {
  double gradient_seconds = 0.0;
  double refinement_seconds = 0.0;
  double total_seconds = 0.0;
};

enum class WinnerKind { None, Trivial, Gradient, Worker };

struct GradientSummary {
  std::uint32_t iterations = 0;
  double best_fraction = 0.0;
  StopReason stop_reason = StopReason::MaxIterations;
  std::vector<TraceRow> trace;
};

struct HybridResult {
  SolveOutcome outcome;
  WinnerKind winner = WinnerKind::None;
  std::size_t winning_worker = 0;  // meaningful when winner == Worker
  PhaseTimings timings;
  std::optional<GradientSummary> gradient;
  std::vector<PartialAssignment> partials;
  std::vector<WorkerReport> workers;
};

HybridResult solve_hybrid(const CnfFormula& formula, const HybridConfig& config);

// Versioned stats document ("schema": 1).
nlohmann::json to_json(const HybridResult& result);

}  // namespace gradsat
