#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradsat/cnf.hpp"
#include "gradsat/grad_engine.hpp"

namespace gradsat {

// Seed for one CDCL worker: the most confident variables of one candidate,
// most confident first.
struct PartialAssignment {
  std::vector<Literal> literals;
  std::vector<double> confidences;  // |gradient|, aligned with literals, ascending
  std::size_t source_column = 0;
  std::uint32_t satisfied_count = 0;
};

// max(ceil(0.01% of V), 20), capped at V.
std::size_t compute_k(std::size_t num_vars);

enum class ConfidenceSignal {
  VariableGradient,  // folded literal gradient, before the normalization Jacobian
  ThetaGradient,     // full gradient with respect to the raw parameters
};

// Picks the k smallest-|gradient| variables of each column, columns ordered by
// satisfied clause count (descending, ties to the lower column), truncated to
// `num_requested`. `a` is the 2V x N binary matrix the gradients belong to.
std::vector<PartialAssignment> extract(const GradSnapshot& snapshot, const BinaryMatrix& a,
                                       std::size_t num_requested,
                                       ConfidenceSignal signal = ConfidenceSignal::VariableGradient);

// {"column":i,"sat_count":s,"vars":[[v,bool],...]} with 1-based variables.
nlohmann::json to_json(const PartialAssignment& partial);

}  // namespace gradsat
