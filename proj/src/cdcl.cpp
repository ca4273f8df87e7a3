#include "gradsat/cdcl.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace gradsat {

// Binary max-heap over variables keyed by activity, ties to the lower index.
class Solver::VarHeap {
 public:
  explicit VarHeap(const std::vector<double>& activity)
      : activity_(activity), position_(activity.size(), kAbsent) {}

  bool empty() const { return heap_.empty(); }
  bool contains(Var v) const { return position_[v] != kAbsent; }

  void insert(Var v) {
    if (contains(v)) return;
    position_[v] = heap_.size();
    heap_.push_back(v);
    sift_up(position_[v]);
  }

  void increased(Var v) {
    if (contains(v)) sift_up(position_[v]);
  }

  Var pop() {
    const Var top = heap_.front();
    heap_.front() = heap_.back();
    position_[heap_.front()] = 0;
    heap_.pop_back();
    position_[top] = kAbsent;
    if (!heap_.empty()) sift_down(0);
    return top;
  }

 private:
  static constexpr std::size_t kAbsent = ~std::size_t{0};

  bool before(Var a, Var b) const {
    return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
  }

  void sift_up(std::size_t i) {
    const Var v = heap_[i];
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!before(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      position_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = v;
    position_[v] = i;
  }

  void sift_down(std::size_t i) {
    const Var v = heap_[i];
    const std::size_t n = heap_.size();
    while (2 * i + 1 < n) {
      std::size_t child = 2 * i + 1;
      if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], v)) break;
      heap_[i] = heap_[child];
      position_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    position_[v] = i;
  }

  const std::vector<double>& activity_;
  std::vector<Var> heap_;
  std::vector<std::size_t> position_;
};

double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

Solver::Solver(const CnfFormula& formula, SolverOptions options)
    : formula_(formula),
      options_(std::move(options)),
      num_vars_(formula.num_vars()),
      assigns_(num_vars_, LBool::Undef),
      level_(num_vars_, 0),
      reason_(num_vars_, kNoClause),
      phase_(num_vars_, 0),
      activity_(num_vars_, 0.0),
      seen_(num_vars_, 0),
      watches_(2 * static_cast<std::size_t>(num_vars_)),
      max_learnts_(options_.learnt_slack) {
  if (!options_.initial_phase.empty()) {
    if (options_.initial_phase.size() != num_vars_)
      throw std::invalid_argument("initial_phase length does not match variable count");
    phase_ = options_.initial_phase;
  }
  if (options_.random_seed != 0) {
    std::mt19937_64 rng(options_.random_seed);
    std::uniform_real_distribution<double> jitter(0.0, 1e-5);
    for (auto& a : activity_) a = jitter(rng);
  }
  heap_ = std::make_unique<VarHeap>(activity_);
  for (Var v = 0; v < num_vars_; ++v) heap_->insert(v);

  for (std::size_t i = 0; i < formula.num_clauses() && ok_; ++i) {
    if (formula.is_tautology(i)) continue;
    auto lits = formula.clause(i);
    if (lits.empty()) {
      ok_ = false;
    } else if (lits.size() == 1) {
      const LBool val = value(lits[0]);
      if (val == LBool::False) ok_ = false;
      else if (val == LBool::Undef) enqueue(lits[0], kNoClause);
    } else {
      attach(add_clause({lits.begin(), lits.end()}, false, 0));
    }
  }
}

Solver::~Solver() = default;

LBool Solver::value(Literal l) const {
  const LBool v = assigns_[l.var()];
  if (v == LBool::Undef) return v;
  return (v == LBool::True) == l.positive() ? LBool::True : LBool::False;
}

std::span<const Literal> Solver::clause_literals(ClauseRef c) const { return clauses_[c].lits; }

Solver::ClauseRef Solver::add_clause(std::vector<Literal> lits, bool learnt, std::uint32_t lbd) {
  Clause clause{std::move(lits), 0.0, lbd, learnt, false};
  if (!free_refs_.empty()) {
    const ClauseRef c = free_refs_.back();
    free_refs_.pop_back();
    clauses_[c] = std::move(clause);
    return c;
  }
  clauses_.push_back(std::move(clause));
  return static_cast<ClauseRef>(clauses_.size() - 1);
}

void Solver::attach(ClauseRef c) {
  const auto& lits = clauses_[c].lits;
  watches_[lits[0].code()].push_back({c, lits[1]});
  watches_[lits[1].code()].push_back({c, lits[0]});
}

void Solver::enqueue(Literal l, ClauseRef reason) {
  assigns_[l.var()] = l.positive() ? LBool::True : LBool::False;
  level_[l.var()] = decision_level();
  reason_[l.var()] = reason;
  trail_.push_back(l);
}

void Solver::decide(Literal l) {
  new_decision_level();
  enqueue(l, kNoClause);
}

std::optional<Solver::ClauseRef> Solver::propagate() {
  std::optional<ClauseRef> conflict;
  while (qhead_ < trail_.size()) {
    const Literal p = trail_[qhead_++];
    const Literal false_lit = ~p;
    auto& ws = watches_[false_lit.code()];
    ++stats_.propagations;

    std::size_t i = 0;
    std::size_t j = 0;
    const std::size_t end = ws.size();
    while (i < end) {
      const Watcher w = ws[i];
      if (value(w.blocker) == LBool::True) {
        ws[j++] = ws[i++];
        continue;
      }
      auto& lits = clauses_[w.cref].lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      ++i;

      const Literal first = lits[0];
      const Watcher kept{w.cref, first};
      if (first != w.blocker && value(first) == LBool::True) {
        ws[j++] = kept;
        continue;
      }

      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != LBool::False) {
          std::swap(lits[1], lits[k]);
          watches_[lits[1].code()].push_back(kept);
          moved = true;
          break;
        }
      }
      if (moved) continue;

      ws[j++] = kept;
      if (value(first) == LBool::False) {
        conflict = w.cref;
        qhead_ = trail_.size();
        while (i < end) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (conflict) break;
  }
  return conflict;
}

void Solver::bump_variable(Var v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  heap_->increased(v);
}

void Solver::bump_clause(Clause& c) {
  if ((c.activity += clause_inc_) > 1e20) {
    for (ClauseRef r : learnts_) clauses_[r].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

void Solver::decay_activities() {
  var_inc_ /= options_.var_decay;
  clause_inc_ /= options_.clause_decay;
}

ConflictAnalysis Solver::analyze_conflict(ClauseRef conflict) {
  if (decision_level() == 0) throw std::logic_error("conflict analysis at decision level 0");
  ConflictAnalysis out;
  auto& learnt = out.learnt;
  learnt.emplace_back();  // asserting literal goes here

  int path = 0;
  std::optional<Literal> p;
  std::size_t index = trail_.size();
  ClauseRef confl = conflict;
  do {
    Clause& c = clauses_[confl];
    if (c.learnt) bump_clause(c);
    for (std::size_t j = p ? 1 : 0; j < c.lits.size(); ++j) {
      const Literal q = c.lits[j];
      const Var v = q.var();
      if (seen_[v] || level_[v] == 0) continue;
      bump_variable(v);
      seen_[v] = 1;
      if (level_[v] >= decision_level()) ++path;
      else learnt.push_back(q);
    }
    while (!seen_[trail_[--index].var()]) {
    }
    p = trail_[index];
    confl = reason_[p->var()];
    seen_[p->var()] = 0;
    --path;
  } while (path > 0);
  learnt[0] = ~*p;

  // Drop literals whose reason is covered by the rest of the clause.
  std::vector<Literal> marked(learnt.begin() + 1, learnt.end());
  std::size_t keep = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    const ClauseRef r = reason_[learnt[i].var()];
    bool redundant = r != kNoClause;
    if (redundant) {
      const auto& lits = clauses_[r].lits;
      for (std::size_t k = 1; k < lits.size(); ++k) {
        const Var v = lits[k].var();
        if (!seen_[v] && level_[v] > 0) {
          redundant = false;
          break;
        }
      }
    }
    if (!redundant) learnt[keep++] = learnt[i];
  }
  learnt.resize(keep);
  for (Literal l : marked) seen_[l.var()] = 0;

  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[learnt[i].var()] > level_[learnt[max_i].var()]) max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    out.backjump_level = level_[learnt[1].var()];
  }

  std::vector<int> levels;
  levels.reserve(learnt.size());
  for (Literal l : learnt) levels.push_back(level_[l.var()]);
  std::sort(levels.begin(), levels.end());
  out.lbd = static_cast<std::uint32_t>(std::unique(levels.begin(), levels.end()) - levels.begin());
  return out;
}

std::optional<Literal> Solver::pick_branch_literal() {
  while (!heap_->empty()) {
    const Var v = heap_->pop();
    if (assigns_[v] == LBool::Undef) return Literal(v, phase_[v] != 0);
  }
  return std::nullopt;
}

void Solver::backtrack(int level) {
  if (decision_level() <= level) return;
  const std::size_t stop = trail_lim_[static_cast<std::size_t>(level)];
  for (std::size_t i = trail_.size(); i-- > stop;) {
    const Var v = trail_[i].var();
    phase_[v] = assigns_[v] == LBool::True ? 1 : 0;
    assigns_[v] = LBool::Undef;
    reason_[v] = kNoClause;
    heap_->insert(v);
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = std::min(qhead_, trail_.size());
}

bool Solver::locked(ClauseRef c) const {
  const Literal first = clauses_[c].lits[0];
  return reason_[first.var()] == c && value(first) == LBool::True;
}

void Solver::reduce_db() {
  std::vector<ClauseRef> candidates;
  for (ClauseRef c : learnts_)
    if (clauses_[c].lbd > 2 && !locked(c)) candidates.push_back(c);
  std::stable_sort(candidates.begin(), candidates.end(), [&](ClauseRef a, ClauseRef b) {
    return clauses_[a].activity < clauses_[b].activity;
  });
  candidates.resize(candidates.size() / 2);
  for (ClauseRef c : candidates) {
    clauses_[c].deleted = true;
    clauses_[c].lits.clear();
    clauses_[c].lits.shrink_to_fit();
    free_refs_.push_back(c);
  }
  stats_.deleted += candidates.size();
  for (auto& ws : watches_)
    std::erase_if(ws, [&](const Watcher& w) { return clauses_[w.cref].deleted; });
  std::erase_if(learnts_, [&](ClauseRef c) { return clauses_[c].deleted; });
  if (learnts_.size() * 2 > max_learnts_) max_learnts_ += max_learnts_ / 10;
}

bool Solver::out_of_budget() {
  if (cancel_ && cancel_->load(std::memory_order_relaxed)) return true;
  if (conflict_cap_ && stats_.conflicts >= *conflict_cap_) return true;
  if (deadline_ && (++loop_counter_ & 63) == 0 && std::chrono::steady_clock::now() >= *deadline_)
    return true;
  return false;
}

Solver::SearchResult Solver::search(std::uint64_t conflict_limit) {
  std::uint64_t conflicts = 0;
  for (;;) {
    if (auto confl = propagate()) {
      ++stats_.conflicts;
      ++conflicts;
      if (decision_level() == 0) return SearchResult::Unsat;
      ConflictAnalysis analysis = analyze_conflict(*confl);
      if (options_.on_learn) options_.on_learn(analysis.learnt, analysis.backjump_level);
      backtrack(analysis.backjump_level);
      if (analysis.learnt.size() == 1) {
        enqueue(analysis.learnt[0], kNoClause);
      } else {
        const Literal asserting = analysis.learnt[0];
        const ClauseRef c = add_clause(std::move(analysis.learnt), true, analysis.lbd);
        learnts_.push_back(c);
        attach(c);
        bump_clause(clauses_[c]);
        enqueue(asserting, c);
      }
      ++stats_.learned;
      decay_activities();
      if (out_of_budget()) return SearchResult::Interrupted;
      continue;
    }

    if (out_of_budget()) return SearchResult::Interrupted;
    if (conflicts >= conflict_limit) {
      backtrack(0);
      return SearchResult::Restart;
    }
    if (learnts_.size() >= max_learnts_) reduce_db();

    std::optional<Literal> next;
    while (static_cast<std::size_t>(decision_level()) < assumptions_.size()) {
      const Literal a = assumptions_[static_cast<std::size_t>(decision_level())];
      const LBool val = value(a);
      if (val == LBool::True) {
        new_decision_level();
      } else if (val == LBool::False) {
        return SearchResult::UnsatUnderAssumptions;
      } else {
        next = a;
        break;
      }
    }
    if (!next) {
      next = pick_branch_literal();
      if (!next) return SearchResult::Sat;
      ++stats_.decisions;
    }
    decide(*next);
  }
}

SolveOutcome Solver::solve(std::span<const Literal> assumptions, const Budget& budget,
                           const std::atomic<bool>* cancel) {
  const auto start = std::chrono::steady_clock::now();
  for (Literal a : assumptions)
    if (a.var() >= num_vars_) throw std::invalid_argument("assumption variable out of range");

  assumptions_.assign(assumptions.begin(), assumptions.end());
  cancel_ = cancel;
  deadline_.reset();
  if (budget.max_time)
    deadline_ = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(*budget.max_time);
  conflict_cap_.reset();
  if (budget.max_conflicts) conflict_cap_ = stats_.conflicts + *budget.max_conflicts;

  SolveOutcome outcome;
  SearchResult result = SearchResult::Unsat;
  if (ok_) {
    backtrack(0);
    if (propagate()) {
      ok_ = false;
    } else {
      for (std::uint64_t round = 0;; ++round) {
        result = search(static_cast<std::uint64_t>(luby(2.0, round) * options_.restart_unit));
        if (result != SearchResult::Restart) break;
        ++stats_.restarts;
      }
    }
  }

  switch (ok_ ? result : SearchResult::Unsat) {
    case SearchResult::Sat: {
      Model model(num_vars_);
      for (Var v = 0; v < num_vars_; ++v) model.set(v, assigns_[v] == LBool::True);
      if (!verify_model(formula_, model)) throw std::logic_error("solver produced an invalid model");
      outcome.status = SolveStatus::Sat;
      outcome.model = std::move(model);
      break;
    }
    case SearchResult::Unsat:
      ok_ = false;
      outcome.status = SolveStatus::Unsat;
      break;
    case SearchResult::UnsatUnderAssumptions:
      outcome.status = SolveStatus::UnsatUnderAssumptions;
      break;
    default:
      outcome.status = SolveStatus::Unknown;
      break;
  }
  backtrack(0);
  assumptions_.clear();
  cancel_ = nullptr;
  stats_.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.stats = stats_;
  return outcome;
}

bool Solver::check_watch_invariant() const {
  std::vector<std::size_t> watch_count(clauses_.size(), 0);
  for (std::size_t code = 0; code < watches_.size(); ++code) {
    for (const Watcher& w : watches_[code]) {
      const Clause& c = clauses_[w.cref];
      if (c.deleted) return false;
      if (c.lits[0].code() != code && c.lits[1].code() != code) return false;
      ++watch_count[w.cref];
    }
  }
  for (ClauseRef r = 0; r < clauses_.size(); ++r) {
    const Clause& c = clauses_[r];
    if (c.deleted) continue;
    if (watch_count[r] != 2) return false;
    const bool false_watch = value(c.lits[0]) == LBool::False || value(c.lits[1]) == LBool::False;
    if (false_watch && std::none_of(c.lits.begin(), c.lits.end(),
                                    [&](Literal l) { return value(l) == LBool::True; }))
      return false;
  }
  return true;
}

SolveOutcome solve(const CnfFormula& formula, std::span<const Literal> assumptions,
                   const Budget& budget, SolverOptions options) {
  Solver solver(formula, std::move(options));
  return solver.solve(assumptions, budget);
}

void write_dimacs_with_assumptions(std::ostream& out, const CnfFormula& formula,
                                   std::span<const Literal> assumptions) {
  out << "p cnf " << formula.num_vars() << ' ' << formula.num_clauses() + assumptions.size()
      << '\n';
  for (std::size_t i = 0; i < formula.num_clauses(); ++i) {
    for (Literal l : formula.clause(i)) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
  for (Literal a : assumptions) out << a.to_dimacs() << " 0\n";
}

}  // namespace gradsat
