#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace gradsat {

// `gradsat` front end. `args` excludes the program name. Returns the process
// exit code: 10 SAT, 20 UNSAT, 0 UNKNOWN, 1 for usage or input errors.
int main_solve(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// `gradsat-bench` front end with `suite` and `generate` subcommands.
int main_bench(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gradsat
