#include "gradsat/solution_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace gradsat {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    case SolveStatus::UnsatUnderAssumptions: return "UNSAT_UNDER_ASSUMPTIONS";
    case SolveStatus::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string_view competition_status(SolveStatus status) {
  switch (status) {
    case SolveStatus::Sat: return "SATISFIABLE";
    case SolveStatus::Unsat: return "UNSATISFIABLE";
    default: return "UNKNOWN";
  }
}

int competition_exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::Sat: return 10;
    case SolveStatus::Unsat: return 20;
    default: return 0;
  }
}

void write_solution(std::ostream& out, SolveStatus status, const Model* model) {
  out << "s " << competition_status(status) << '\n';
  if (status != SolveStatus::Sat || model == nullptr) return;
  std::string line = "v";
  for (Var v = 0; v < model->size(); ++v) {
    std::string lit = ' ' + std::to_string(Literal(v, (*model)[v]).to_dimacs());
    if (line.size() + lit.size() > 78) {
      out << line << '\n';
      line = "v";
    }
    line += lit;
  }
  out << line << " 0\n";
}

SolverOutput parse_solution(std::istream& in, std::uint32_t num_vars) {
  SolverOutput result;
  Model model(num_vars);
  bool saw_status = false;
  bool saw_values = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == 's') {
      std::string status = line.substr(1);
      status.erase(0, status.find_first_not_of(" \t"));
      status.erase(status.find_last_not_of(" \t\r") + 1);
      if (status == "SATISFIABLE") result.status = SolveStatus::Sat;
      else if (status == "UNSATISFIABLE") result.status = SolveStatus::Unsat;
      else if (status == "UNKNOWN") result.status = SolveStatus::Unknown;
      else throw ParseError(lineno, "unrecognized status '" + status + "'");
      saw_status = true;
    } else if (line[0] == 'v') {
      std::istringstream tokens(line.substr(1));
      long long value = 0;
      while (tokens >> value) {
        if (value == 0) continue;
        long long var = value < 0 ? -value : value;
        if (var > num_vars) throw ParseError(lineno, "value for unknown variable");
        model.set(static_cast<Var>(var - 1), value > 0);
      }
      if (!tokens.eof()) throw ParseError(lineno, "malformed value line");
      saw_values = true;
    }
  }
  if (!saw_status) throw ParseError(lineno, "missing status line");
  if (result.status == SolveStatus::Sat) {
    if (!saw_values) throw ParseError(lineno, "SAT answer without value lines");
    result.model = std::move(model);
  }
  return result;
}

}  // namespace gradsat
