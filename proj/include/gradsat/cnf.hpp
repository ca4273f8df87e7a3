#pragma once

#include <cstdint>
#include <cstdlib>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gradsat {

using Var = std::uint32_t;

// A literal packed as 2*var + negated. Variables are 0-indexed internally;
// DIMACS conversion shifts by one. The packed code doubles as the literal's
// column in the problem matrix (positive and negative columns interleaved).
class Literal {
 public:
  constexpr Literal() = default;
  constexpr Literal(Var var, bool positive)
      : code_(2 * var + (positive ? 0u : 1u)) {}

  static constexpr Literal from_code(std::uint32_t code) {
    Literal l;
    l.code_ = code;
    return l;
  }
  static Literal from_dimacs(int value) {
    return Literal(static_cast<Var>(std::abs(value)) - 1, value > 0);
  }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool positive() const { return (code_ & 1u) == 0; }
  constexpr std::uint32_t code() const { return code_; }
  int to_dimacs() const {
    int v = static_cast<int>(var()) + 1;
    return positive() ? v : -v;
  }

  constexpr Literal operator~() const { return from_code(code_ ^ 1u); }
  constexpr auto operator<=>(const Literal&) const = default;

 private:
  std::uint32_t code_ = 0;
};

// Total assignment: values[v] is the truth value of variable v (0-indexed).
class Model {
 public:
  Model() = default;
  explicit Model(std::size_t num_vars) : values_(num_vars, 0) {}
  explicit Model(std::vector<std::uint8_t> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  bool operator[](Var v) const { return values_[v] != 0; }
  void set(Var v, bool value) { values_[v] = value ? 1 : 0; }
  bool satisfies(Literal l) const { return (*this)[l.var()] == l.positive(); }
  std::span<const std::uint8_t> values() const { return values_; }

  bool operator==(const Model&) const = default;

 private:
  std::vector<std::uint8_t> values_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Immutable clause database. Clauses are stored flat; duplicate literals are
// removed on construction while tautologies are kept and flagged.
class CnfFormula {
 public:
  CnfFormula() = default;
  CnfFormula(std::uint32_t num_vars, const std::vector<std::vector<Literal>>& clauses,
             std::string source_name = {});

  std::uint32_t num_vars() const { return num_vars_; }
  std::size_t num_clauses() const { return offsets_.size() - 1; }
  std::size_t num_literals() const { return literals_.size(); }
  std::span<const Literal> clause(std::size_t i) const {
    return {literals_.data() + offsets_[i], literals_.data() + offsets_[i + 1]};
  }
  bool is_tautology(std::size_t i) const { return tautology_[i] != 0; }
  bool has_empty_clause() const { return has_empty_; }
  const std::string& source_name() const { return source_name_; }

  bool operator==(const CnfFormula& o) const {
    return num_vars_ == o.num_vars_ && literals_ == o.literals_ && offsets_ == o.offsets_;
  }

 private:
  std::uint32_t num_vars_ = 0;
  std::vector<Literal> literals_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint8_t> tautology_;
  bool has_empty_ = false;
  std::string source_name_;
};

// Parses DIMACS CNF. Recoverable oddities (clause-count mismatch, missing
// final terminator) are appended to `warnings` when it is non-null.
CnfFormula parse_dimacs(std::istream& in, std::string source_name = {},
                        std::vector<std::string>* warnings = nullptr);
CnfFormula parse_dimacs_string(std::string_view text, std::string source_name = {},
                               std::vector<std::string>* warnings = nullptr);
CnfFormula parse_dimacs_file(const std::string& path,
                             std::vector<std::string>* warnings = nullptr);

void write_dimacs(std::ostream& out, const CnfFormula& formula);

bool clause_satisfied(std::span<const Literal> clause, const Model& model);
std::size_t count_satisfied_clauses(const CnfFormula& formula, const Model& model);
bool verify_model(const CnfFormula& formula, const Model& model);

}  // namespace gradsat
