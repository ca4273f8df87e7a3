#include "gradsat/matrix_encoding.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gradsat {

ProblemMatrix::ProblemMatrix(const CnfFormula& formula) : num_vars_(formula.num_vars()) {
  const std::size_t rows = formula.num_clauses();
  row_offsets_.reserve(rows + 1);
  column_indices_.reserve(formula.num_literals());
  for (std::size_t c = 0; c < rows; ++c) {
    const std::size_t begin = column_indices_.size();
    for (Literal l : formula.clause(c)) column_indices_.push_back(l.code());
    std::sort(column_indices_.begin() + static_cast<std::ptrdiff_t>(begin), column_indices_.end());
    row_offsets_.push_back(static_cast<std::uint32_t>(column_indices_.size()));
  }

  const std::size_t cols = num_columns();
  std::vector<std::uint32_t> counts(cols + 1, 0);
  for (auto col : column_indices_) ++counts[col + 1];
  col_offsets_.assign(cols + 1, 0);
  for (std::size_t j = 0; j < cols; ++j) col_offsets_[j + 1] = col_offsets_[j] + counts[j + 1];
  row_indices_.resize(column_indices_.size());
  std::vector<std::uint32_t> fill(col_offsets_.begin(), col_offsets_.end() - 1);
  for (std::size_t c = 0; c < rows; ++c)
    for (auto col : row(c)) row_indices_[fill[col]++] = static_cast<std::uint32_t>(c);
}

BinaryMatrix ProblemMatrix::to_dense() const {
  BinaryMatrix dense = BinaryMatrix::Zero(static_cast<Eigen::Index>(num_clauses()),
                                          static_cast<Eigen::Index>(num_columns()));
  for (std::size_t c = 0; c < num_clauses(); ++c)
    for (auto col : row(c)) dense(static_cast<Eigen::Index>(c), col) = 1;
  return dense;
}

ProblemMatrix encode_problem(const CnfFormula& formula) { return ProblemMatrix(formula); }

CountMatrix spmm_forward(const ProblemMatrix& p, const BinaryMatrix& a) {
  CountMatrix r;
  spmm_forward(p, a, r);
  return r;
}

void spmm_forward(const ProblemMatrix& p, const BinaryMatrix& a, CountMatrix& r) {
  if (static_cast<std::size_t>(a.rows()) != p.num_columns())
    throw std::invalid_argument("assignment matrix has " + std::to_string(a.rows()) +
                                " rows, expected " + std::to_string(p.num_columns()));
  const Eigen::Index n = a.cols();
  r.resize(static_cast<Eigen::Index>(p.num_clauses()), n);
  r.setZero();
  for (std::size_t c = 0; c < p.num_clauses(); ++c) {
    auto out = r.row(static_cast<Eigen::Index>(c));
    for (auto col : p.row(c)) out += a.row(col).cast<std::int32_t>();
  }
}

RealMatrix spmm_transpose(const ProblemMatrix& p, const RealMatrix& g) {
  RealMatrix out;
  spmm_transpose(p, g, out);
  return out;
}

void spmm_transpose(const ProblemMatrix& p, const RealMatrix& g, RealMatrix& out) {
  if (static_cast<std::size_t>(g.rows()) != p.num_clauses())
    throw std::invalid_argument("gradient matrix has " + std::to_string(g.rows()) +
                                " rows, expected " + std::to_string(p.num_clauses()));
  const Eigen::Index n = g.cols();
  out.resize(static_cast<Eigen::Index>(p.num_columns()), n);
  out.setZero();
  for (std::size_t col = 0; col < p.num_columns(); ++col) {
    auto dst = out.row(static_cast<Eigen::Index>(col));
    for (auto c : p.column(col)) dst += g.row(c);
  }
}

void write_matrix_market(std::ostream& out, const ProblemMatrix& p) {
  out << "%%MatrixMarket matrix coordinate pattern general\n";
  out << p.num_clauses() << ' ' << p.num_columns() << ' ' << p.nnz() << '\n';
  for (std::size_t c = 0; c < p.num_clauses(); ++c)
    for (auto col : p.row(c)) out << c + 1 << ' ' << col + 1 << '\n';
}

}  // namespace gradsat
