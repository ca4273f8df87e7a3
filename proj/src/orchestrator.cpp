#include "gradsat/orchestrator.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace gradsat {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t worker) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (worker + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z == 0 ? 1 : z;
}

// Single-consumer channel of worker outcomes.
struct ResultChannel {
  struct Message {
    std::size_t worker;
    SolveOutcome outcome;
  };

  void post(std::size_t worker, SolveOutcome outcome) {
    {
      std::lock_guard lock(mutex);
      messages.push_back({worker, std::move(outcome)});
    }
    ready.notify_one();
  }

  std::mutex mutex;
  std::condition_variable ready;
  std::vector<Message> messages;
};

}  // namespace

void HybridConfig::validate() const {
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  optimizer.validate();
  if (global_timeout && global_timeout->count() <= 0)
    throw std::invalid_argument("global timeout must be positive");
  if (worker_budget.max_time && worker_budget.max_time->count() <= 0)
    throw std::invalid_argument("worker time budget must be positive");
  if (worker_budget.max_conflicts && *worker_budget.max_conflicts == 0)
    throw std::invalid_argument("worker conflict budget must be positive");
}

std::vector<WorkerPlan> dispatch_plan(std::span<const PartialAssignment> partials,
                                      std::size_t workers, std::uint64_t seed) {
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  std::vector<WorkerPlan> plan(workers);
  const std::size_t seeded = std::min(workers - 1, partials.size());
  for (std::size_t w = 0; w < workers; ++w) {
    plan[w].worker = w;
    if (w >= 1 && w <= seeded) plan[w].partial = w - 1;
    else if (w > 0) plan[w].heuristic_seed = mix_seed(seed, w);
  }
  return plan;
}

HybridResult solve_hybrid(const CnfFormula& formula, const HybridConfig& config) {
  config.validate();
  const auto start = Clock::now();
  std::optional<Clock::time_point> deadline;
  if (config.global_timeout)
    deadline = start + std::chrono::duration_cast<Clock::duration>(*config.global_timeout);

  HybridResult result;
  auto finish = [&]() -> HybridResult {
    result.timings.total_seconds = seconds_since(start);
    return std::move(result);
  };

  if (formula.has_empty_clause()) {
    result.outcome.status = SolveStatus::Unsat;
    result.winner = WinnerKind::Trivial;
    return finish();
  }
  if (formula.num_clauses() == 0) {
    result.outcome.status = SolveStatus::Sat;
    result.outcome.model = Model(formula.num_vars());
    result.winner = WinnerKind::Trivial;
    return finish();
  }

  std::size_t active_workers = config.workers;
  std::optional<GradSnapshot> snapshot;
  if (config.mode != PipelineMode::UnseededOnly) {
    OptimizerConfig opt = config.optimizer;
    opt.rng_seed = config.seed;
    const ProblemMatrix problem = encode_problem(formula);
    GradPhaseControl control;
    control.deadline = deadline;
    snapshot = run_gradient_phase(problem, opt, control);
    result.timings.gradient_seconds = seconds_since(start);
    result.gradient = GradientSummary{snapshot->iterations, snapshot->best_fraction(),
                                      snapshot->stop_reason, std::move(snapshot->trace)};

    if (snapshot->satisfying_column) {
      Model model = decode_model(snapshot->assignment, *snapshot->satisfying_column);
      if (!verify_model(formula, model))
        throw std::logic_error("gradient phase reported an invalid model");
      result.outcome.status = SolveStatus::Sat;
      result.outcome.model = std::move(model);
      result.winner = WinnerKind::Gradient;
      return finish();
    }
    if (config.mode == PipelineMode::GradientOnly) {
      result.outcome.status = SolveStatus::Unknown;
      return finish();
    }
    if (config.workers > 1)
      result.partials = extract(*snapshot, snapshot->assignment, config.workers - 1,
                                config.confidence_signal);
  } else {
    active_workers = 1;
  }

  if (deadline && Clock::now() >= *deadline) {
    result.outcome.status = SolveStatus::Unknown;
    return finish();
  }

  const auto plan = dispatch_plan(result.partials, active_workers, config.seed);
  const auto refine_start = Clock::now();
  std::atomic<bool> cancel{false};
  ResultChannel channel;
  result.workers.resize(plan.size());

  auto run_worker = [&](const WorkerPlan& wp) {
    WorkerReport& report = result.workers[wp.worker];
    report.id = wp.worker;
    report.heuristic_seed = wp.heuristic_seed;

    SolverOptions options;
    options.random_seed = wp.heuristic_seed;
    std::vector<Literal> assumptions;
    if (wp.partial) {
      const PartialAssignment& seed = result.partials[*wp.partial];
      assumptions = seed.literals;
      report.source_column = seed.source_column;
      if (config.phase_from_seed && snapshot) {
        const Model phases = decode_model(snapshot->assignment, seed.source_column);
        options.initial_phase.assign(phases.values().begin(), phases.values().end());
      }
    }
    report.initial_assumptions = assumptions.size();

    Solver solver(formula, std::move(options));
    SolveOutcome outcome;
    for (;;) {
      Budget budget = config.worker_budget;
      if (deadline) {
        const std::chrono::duration<double> left = *deadline - Clock::now();
        if (left.count() <= 0) break;
        if (!budget.max_time || *budget.max_time > left) budget.max_time = left;
      }
      outcome = solver.solve(assumptions, budget, &cancel);
      if (outcome.status != SolveStatus::UnsatUnderAssumptions) break;
      if (!config.halve_refuted_seeds) break;
      assumptions.resize(assumptions.size() / 2);
      ++report.relaunches;
      if (cancel.load()) break;
    }
    report.final_assumptions = assumptions.size();
    report.status = outcome.status;
    report.stats = solver.stats();
    channel.post(wp.worker, std::move(outcome));
  };

  std::vector<std::jthread> threads;
  threads.reserve(plan.size());
  for (const auto& wp : plan) threads.emplace_back(run_worker, wp);

  {
    std::unique_lock lock(channel.mutex);
    std::size_t consumed = 0;
    bool decided = false;
    while (!decided) {
      auto have_news = [&] { return channel.messages.size() > consumed; };
      if (deadline) {
        if (!channel.ready.wait_until(lock, *deadline, have_news)) break;
      } else {
        channel.ready.wait(lock, have_news);
      }
      for (; consumed < channel.messages.size() && !decided; ++consumed) {
        auto& msg = channel.messages[consumed];
        const SolveStatus s = msg.outcome.status;
        // UNSAT only counts when it comes from the worker that never had seeds.
        if (s == SolveStatus::Sat || (s == SolveStatus::Unsat && msg.worker == 0)) {
          result.outcome = std::move(msg.outcome);
          result.winner = WinnerKind::Worker;
          result.winning_worker = msg.worker;
          decided = true;
        }
      }
      if (consumed == plan.size()) break;
    }
    cancel.store(true);
  }
  threads.clear();  // joins

  if (result.winner != WinnerKind::Worker) result.outcome.status = SolveStatus::Unknown;
  if (result.outcome.status == SolveStatus::Sat && !verify_model(formula, *result.outcome.model))
    throw std::logic_error("worker reported an invalid model");
  result.outcome.stats = result.workers[result.winner == WinnerKind::Worker ? result.winning_worker : 0].stats;
  result.timings.refinement_seconds = seconds_since(refine_start);
  return finish();
}

nlohmann::json to_json(const HybridResult& result) {
  using nlohmann::json;
  json doc;
  doc["schema"] = 1;
  doc["status"] = std::string(to_string(result.outcome.status));
  switch (result.winner) {
    case WinnerKind::None: doc["winner"] = nullptr; break;
    case WinnerKind::Trivial: doc["winner"] = "trivial"; break;
    case WinnerKind::Gradient: doc["winner"] = "gradient"; break;
    case WinnerKind::Worker: doc["winner"] = "worker-" + std::to_string(result.winning_worker); break;
  }
  doc["timings"] = {{"gradient_seconds", result.timings.gradient_seconds},
                    {"refinement_seconds", result.timings.refinement_seconds},
                    {"total_seconds", result.timings.total_seconds}};
  if (result.gradient) {
    doc["gradient"] = {{"iterations", result.gradient->iterations},
                       {"best_fraction", result.gradient->best_fraction},
                       {"stop_reason", std::string(to_string(result.gradient->stop_reason))}};
  } else {
    doc["gradient"] = nullptr;
  }
  json workers = json::array();
  for (const auto& w : result.workers) {
    workers.push_back({{"id", w.id},
                       {"seeded", w.source_column.has_value()},
                       {"source_column", w.source_column ? json(*w.source_column) : json(nullptr)},
                       {"initial_assumptions", w.initial_assumptions},
                       {"final_assumptions", w.final_assumptions},
                       {"relaunches", w.relaunches},
                       {"heuristic_seed", w.heuristic_seed},
                       {"status", std::string(to_string(w.status))},
                       {"conflicts", w.stats.conflicts},
                       {"decisions", w.stats.decisions},
                       {"propagations", w.stats.propagations},
                       {"restarts", w.stats.restarts},
                       {"seconds", w.stats.seconds}});
  }
  doc["workers"] = std::move(workers);
  return doc;
}

}  // namespace gradsat
