#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gradsat/cnf.hpp"

namespace gradsat {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RealMatrix = RowMatrix<double>;
using CountMatrix = RowMatrix<std::int32_t>;
// Literal-major 0/1 matrix: row 2v is the positive literal of v, row 2v+1 the negative.
using BinaryMatrix = RowMatrix<std::uint8_t>;

// Clause-by-literal incidence matrix in row-compressed form. Stored entries
// are implicitly 1. A literal-major transpose is kept for the backward kernel
// so both products accumulate in a fixed order.
class ProblemMatrix {
 public:
  ProblemMatrix() = default;
  explicit ProblemMatrix(const CnfFormula& formula);

  std::size_t num_clauses() const { return row_offsets_.size() - 1; }
  std::uint32_t num_vars() const { return num_vars_; }
  std::size_t num_columns() const { return 2 * static_cast<std::size_t>(num_vars_); }
  std::size_t nnz() const { return column_indices_.size(); }

  std::span<const std::uint32_t> row(std::size_t clause) const {
    return {column_indices_.data() + row_offsets_[clause],
            column_indices_.data() + row_offsets_[clause + 1]};
  }
  // Clauses containing literal column `col`, ascending.
  std::span<const std::uint32_t> column(std::size_t col) const {
    return {row_indices_.data() + col_offsets_[col],
            row_indices_.data() + col_offsets_[col + 1]};
  }

  std::span<const std::uint32_t> row_offsets() const { return row_offsets_; }
  std::span<const std::uint32_t> column_indices() const { return column_indices_; }

  BinaryMatrix to_dense() const;

 private:
  std::uint32_t num_vars_ = 0;
  std::vector<std::uint32_t> row_offsets_{0};
  std::vector<std::uint32_t> column_indices_;
  std::vector<std::uint32_t> col_offsets_{0};
  std::vector<std::uint32_t> row_indices_;
};

inline std::size_t positive_column(Var v) { return 2 * static_cast<std::size_t>(v); }
inline std::size_t negative_column(Var v) { return 2 * static_cast<std::size_t>(v) + 1; }

ProblemMatrix encode_problem(const CnfFormula& formula);

// R = P * A. A has 2V rows of 0/1 values; R[c, i] counts the true literals of
// clause c under candidate i.
CountMatrix spmm_forward(const ProblemMatrix& p, const BinaryMatrix& a);
void spmm_forward(const ProblemMatrix& p, const BinaryMatrix& a, CountMatrix& out);

// P^T * G for a C x N real matrix G.
RealMatrix spmm_transpose(const ProblemMatrix& p, const RealMatrix& g);
void spmm_transpose(const ProblemMatrix& p, const RealMatrix& g, RealMatrix& out);

// Matrix Market coordinate dump (1-based, pattern field).
void write_matrix_market(std::ostream& out, const ProblemMatrix& p);

}  // namespace gradsat
