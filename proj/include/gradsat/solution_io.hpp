#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>

#include "gradsat/cnf.hpp"

namespace gradsat {

enum class SolveStatus { Sat, Unsat, UnsatUnderAssumptions, Unknown };

std::string_view to_string(SolveStatus status);

// Status as printed on an `s` line; assumption refutations print as UNKNOWN.
std::string_view competition_status(SolveStatus status);

// SAT Competition exit codes: 10 SAT, 20 UNSAT, 0 otherwise.
int competition_exit_code(SolveStatus status);

// Writes the `s` line and, for SAT, `v` lines terminated by 0.
void write_solution(std::ostream& out, SolveStatus status, const Model* model);

struct SolverOutput {
  SolveStatus status = SolveStatus::Unknown;
  std::optional<Model> model;
};

// Reads `s`/`v` lines as emitted by a competition-style solver. Values absent
// from the `v` lines default to false. Throws ParseError on malformed input.
SolverOutput parse_solution(std::istream& in, std::uint32_t num_vars);

}  // namespace gradsat
