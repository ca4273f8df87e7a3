#pragma once

#include <cstdint>

#include "gradsat/cnf.hpp"

namespace gradsat {

// Uniform random k-SAT: each clause draws k distinct variables and random signs.
CnfFormula random_ksat(std::uint32_t num_vars, std::size_t num_clauses, std::uint32_t k,
                       std::uint64_t seed);

struct PlantedInstance {
  CnfFormula formula;
  Model solution;
};

// Random k-SAT conditioned on a hidden uniformly random model: clauses the
// model falsifies are redrawn.
PlantedInstance planted_ksat(std::uint32_t num_vars, std::size_t num_clauses, std::uint32_t k,
                             std::uint64_t seed);

}  // namespace gradsat
