#pragma once

#include "gradsat/cnf.hpp"
#include "gradsat/matrix_encoding.hpp"

namespace fixtures {

// (x1 v x2)(x3 v x4)(-x1 v -x3)(-x2 v x4)(x1 v -x4) with three candidate
// columns: TTFT satisfies all five clauses, TTTF leaves clause 3 with no true
// literal, FTFT gives clause 3 two true literals.
inline constexpr const char* kFourVar =
    "p cnf 4 5\n1 2 0\n3 4 0\n-1 -3 0\n-2 4 0\n1 -4 0\n";

inline gradsat::BinaryMatrix four_var_columns() {
  const int values[3][4] = {{1, 1, 0, 1}, {1, 1, 1, 0}, {0, 1, 0, 1}};
  gradsat::BinaryMatrix a(8, 3);
  for (int col = 0; col < 3; ++col)
    for (int v = 0; v < 4; ++v) {
      a(2 * v, col) = static_cast<std::uint8_t>(values[col][v]);
      a(2 * v + 1, col) = static_cast<std::uint8_t>(1 - values[col][v]);
    }
  return a;
}

inline gradsat::CnfFormula four_var() { return gradsat::parse_dimacs_string(kFourVar, "four"); }

}  // namespace fixtures
