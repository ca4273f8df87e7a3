#include "gradsat/generate.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace gradsat {

namespace {

std::vector<Literal> draw_clause(std::mt19937_64& rng, std::uint32_t num_vars, std::uint32_t k) {
  std::uniform_int_distribution<Var> pick(0, num_vars - 1);
  std::bernoulli_distribution sign(0.5);
  std::vector<Literal> clause;
  clause.reserve(k);
  while (clause.size() < k) {
    const Var v = pick(rng);
    if (std::any_of(clause.begin(), clause.end(), [&](Literal l) { return l.var() == v; }))
      continue;
    clause.emplace_back(v, sign(rng));
  }
  return clause;
}

void check_shape(std::uint32_t num_vars, std::uint32_t k) {
  if (k == 0 || k > num_vars) throw std::invalid_argument("need 1 <= k <= num_vars");
}

}  // namespace

CnfFormula random_ksat(std::uint32_t num_vars, std::size_t num_clauses, std::uint32_t k,
                       std::uint64_t seed) {
  check_shape(num_vars, k);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Literal>> clauses;
  clauses.reserve(num_clauses);
  for (std::size_t i = 0; i < num_clauses; ++i) clauses.push_back(draw_clause(rng, num_vars, k));
  return CnfFormula(num_vars, clauses, "random-" + std::to_string(seed));
}

PlantedInstance planted_ksat(std::uint32_t num_vars, std::size_t num_clauses, std::uint32_t k,
                             std::uint64_t seed) {
  check_shape(num_vars, k);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  Model hidden(num_vars);
  for (Var v = 0; v < num_vars; ++v) hidden.set(v, coin(rng));
  std::vector<std::vector<Literal>> clauses;
  clauses.reserve(num_clauses);
  while (clauses.size() < num_clauses) {
    auto clause = draw_clause(rng, num_vars, k);
    if (clause_satisfied(clause, hidden)) clauses.push_back(std::move(clause));
  }
  return {CnfFormula(num_vars, clauses, "planted-" + std::to_string(seed)), std::move(hidden)};
}

}  // namespace gradsat
