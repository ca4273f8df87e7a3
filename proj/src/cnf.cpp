#include "gradsat/cnf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gradsat {

CnfFormula::CnfFormula(std::uint32_t num_vars,
                       const std::vector<std::vector<Literal>>& clauses,
                       std::string source_name)
    : num_vars_(num_vars), source_name_(std::move(source_name)) {
  std::vector<std::uint8_t> mark(2 * static_cast<std::size_t>(num_vars), 0);
  offsets_.reserve(clauses.size() + 1);
  tautology_.reserve(clauses.size());
  for (const auto& clause : clauses) {
    bool taut = false;
    const std::size_t begin = literals_.size();
    for (Literal l : clause) {
      if (l.var() >= num_vars)
        throw std::invalid_argument("literal " + std::to_string(l.to_dimacs()) +
                                    " exceeds variable count " + std::to_string(num_vars));
      if (mark[l.code()]) continue;
      if (mark[(~l).code()]) taut = true;
      mark[l.code()] = 1;
      literals_.push_back(l);
    }
    for (std::size_t i = begin; i < literals_.size(); ++i) mark[literals_[i].code()] = 0;
    if (literals_.size() == begin) has_empty_ = true;
    offsets_.push_back(static_cast<std::uint32_t>(literals_.size()));
    tautology_.push_back(taut ? 1 : 0);
  }
}

namespace {

bool parse_int(std::string_view token, long long& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace

CnfFormula parse_dimacs(std::istream& in, std::string source_name,
                        std::vector<std::string>* warnings) {
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  bool have_header = false;
  long long declared_vars = 0;
  long long declared_clauses = 0;
  std::vector<std::vector<Literal>> clauses;
  std::vector<Literal> current;
  bool open_clause = false;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = split(line);
    if (tokens.empty()) continue;
    if (tokens[0][0] == 'c') continue;
    if (tokens[0] == "%") break;  // SATLIB end marker
    if (tokens[0] == "p") {
      if (have_header) throw ParseError(lineno, "duplicate header");
      if (tokens.size() != 4 || tokens[1] != "cnf" || !parse_int(tokens[2], declared_vars) ||
          !parse_int(tokens[3], declared_clauses) || declared_vars < 0 || declared_clauses < 0 ||
          declared_vars > (1LL << 30))
        throw ParseError(lineno, "malformed header '" + line + "'");
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(lineno, "clause data before 'p cnf' header");
    for (auto token : tokens) {
      long long value = 0;
      if (!parse_int(token, value))
        throw ParseError(lineno, "non-integer token '" + std::string(token) + "'");
      if (value == 0) {
        if (token != "0") throw ParseError(lineno, "invalid literal '" + std::string(token) + "'");
        clauses.push_back(std::move(current));
        current.clear();
        open_clause = false;
        continue;
      }
      if (value > declared_vars || -value > declared_vars)
        throw ParseError(lineno, "literal " + std::string(token) + " references variable beyond " +
                                     std::to_string(declared_vars));
      current.push_back(Literal::from_dimacs(static_cast<int>(value)));
      open_clause = true;
    }
  }
  if (!have_header) throw ParseError(lineno, "missing 'p cnf' header");
  if (open_clause) {
    warn("final clause not terminated by 0; accepted");
    clauses.push_back(std::move(current));
  }
  if (static_cast<long long>(clauses.size()) != declared_clauses)
    warn("header declares " + std::to_string(declared_clauses) + " clauses, found " +
         std::to_string(clauses.size()));
  return CnfFormula(static_cast<std::uint32_t>(declared_vars), clauses, std::move(source_name));
}

CnfFormula parse_dimacs_string(std::string_view text, std::string source_name,
                               std::vector<std::string>* warnings) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in, std::move(source_name), warnings);
}

CnfFormula parse_dimacs_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_dimacs(in, path, warnings);
}

void write_dimacs(std::ostream& out, const CnfFormula& formula) {
  out << "p cnf " << formula.num_vars() << ' ' << formula.num_clauses() << '\n';
  for (std::size_t i = 0; i < formula.num_clauses(); ++i) {
    for (Literal l : formula.clause(i)) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

bool clause_satisfied(std::span<const Literal> clause, const Model& model) {
  return std::any_of(clause.begin(), clause.end(),
                     [&](Literal l) { return model.satisfies(l); });
}

std::size_t count_satisfied_clauses(const CnfFormula& formula, const Model& model) {
  if (model.size() != formula.num_vars())
    throw std::invalid_argument("model has " + std::to_string(model.size()) +
                                " values, formula has " + std::to_string(formula.num_vars()) +
                                " variables");
  std::size_t count = 0;
  for (std::size_t i = 0; i < formula.num_clauses(); ++i)
    if (clause_satisfied(formula.clause(i), model)) ++count;
  return count;
}

bool verify_model(const CnfFormula& formula, const Model& model) {
  return count_satisfied_clauses(formula, model) == formula.num_clauses();
}

}  // namespace gradsat
