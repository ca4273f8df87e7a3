#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gradsat/cnf.hpp"
#include "gradsat/solution_io.hpp"

namespace gradsat {

enum class LBool : std::uint8_t { True, False, Undef };

struct Budget {
  std::optional<std::uint64_t> max_conflicts;
  std::optional<std::chrono::duration<double>> max_time;
};

struct SolveStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learned = 0;
  std::uint64_t deleted = 0;
  double seconds = 0.0;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Unknown;
  std::optional<Model> model;
  SolveStats stats;
};

struct SolverOptions {
  double var_decay = 0.95;
  double clause_decay = 0.999;
  std::uint32_t restart_unit = 100;  // conflicts per Luby unit
  std::size_t learnt_slack = 4000;   // reduce when learned clauses exceed this
  // Saved phase per variable before search (1 = true). Empty: all false.
  std::vector<std::uint8_t> initial_phase;
  // Nonzero seeds perturb the initial activities to diversify decisions.
  std::uint64_t random_seed = 0;
  // Called with (learned clause, backjump level) before backjumping.
  std::function<void(std::span<const Literal>, int)> on_learn;
};

struct ConflictAnalysis {
  std::vector<Literal> learnt;  // learnt[0] is the asserting literal
  int backjump_level = 0;
  std::uint32_t lbd = 0;
};

// Conflict-driven clause learning solver over a borrowed formula; the formula
// must outlive the solver. Repeated solve() calls keep learned clauses,
// activities and saved phases.
class Solver {
 public:
  using ClauseRef = std::uint32_t;

  explicit Solver(const CnfFormula& formula, SolverOptions options = {});
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  // Assumptions are taken as forced decisions, in order. A returned model is
  // total and has been checked against the formula.
  SolveOutcome solve(std::span<const Literal> assumptions = {}, const Budget& budget = {},
                     const std::atomic<bool>* cancel = nullptr);

  // Step-level interface, used by solve() and exposed for inspection.
  LBool value(Literal l) const;
  LBool value(Var v) const { return assigns_[v]; }
  int level(Var v) const { return level_[v]; }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  std::span<const Literal> trail() const { return trail_; }
  std::uint32_t num_vars() const { return num_vars_; }
  bool okay() const { return ok_; }

  void decide(Literal l);
  std::optional<ClauseRef> propagate();
  ConflictAnalysis analyze_conflict(ClauseRef conflict);
  std::optional<Literal> pick_branch_literal();
  void backtrack(int level);
  void bump_variable(Var v);
  double activity(Var v) const { return activity_[v]; }

  std::span<const Literal> clause_literals(ClauseRef c) const;
  std::size_t num_learnts() const { return learnts_.size(); }
  const SolveStats& stats() const { return stats_; }

  // Every live clause is watched by its first two literals, and any clause
  // with a false watch holds a true literal. Meaningful at a conflict-free
  // propagation fixpoint.
  bool check_watch_invariant() const;

 private:
  struct Clause {
    std::vector<Literal> lits;
    double activity = 0.0;
    std::uint32_t lbd = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    ClauseRef cref;
    Literal blocker;
  };
  class VarHeap;
  enum class SearchResult { Sat, Unsat, UnsatUnderAssumptions, Restart, Interrupted };

  ClauseRef add_clause(std::vector<Literal> lits, bool learnt, std::uint32_t lbd);
  void attach(ClauseRef c);
  void enqueue(Literal l, ClauseRef reason);
  void new_decision_level() { trail_lim_.push_back(trail_.size()); }
  bool locked(ClauseRef c) const;
  void bump_clause(Clause& c);
  void decay_activities();
  void reduce_db();
  SearchResult search(std::uint64_t conflict_limit);
  bool out_of_budget();

  const CnfFormula& formula_;
  SolverOptions options_;
  std::uint32_t num_vars_;
  bool ok_ = true;

  std::vector<LBool> assigns_;
  std::vector<int> level_;
  std::vector<ClauseRef> reason_;
  std::vector<std::uint8_t> phase_;
  std::vector<double> activity_;
  std::vector<std::uint8_t> seen_;
  std::vector<Literal> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<Clause> clauses_;
  std::vector<ClauseRef> free_refs_;
  std::vector<ClauseRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::unique_ptr<VarHeap> heap_;

  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::size_t max_learnts_;
  SolveStats stats_;

  std::vector<Literal> assumptions_;
  const std::atomic<bool>* cancel_ = nullptr;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::optional<std::uint64_t> conflict_cap_;
  std::uint64_t loop_counter_ = 0;
};

inline constexpr Solver::ClauseRef kNoClause = ~Solver::ClauseRef{0};

// Luby sequence value (1, 1, 2, 1, 1, 2, 4, ...) at 0-based index `x`.
double luby(double y, std::uint64_t x);

// One-shot convenience wrapper.
SolveOutcome solve(const CnfFormula& formula, std::span<const Literal> assumptions = {},
                   const Budget& budget = {}, SolverOptions options = {});

// Copy of the formula with each assumption appended as a unit clause, for
// driving an external solver.
void write_dimacs_with_assumptions(std::ostream& out, const CnfFormula& formula,
                                   std::span<const Literal> assumptions);

}  // namespace gradsat
