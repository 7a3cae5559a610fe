#pragma once

#include <string>
#include <vector>

#include "eqs/types.hpp"

namespace eqs {

/// Compressed sparse row matrix. Column indices are sorted and unique within
/// each row. Rectangular shapes are allowed (Dirichlet coupling blocks);
/// assembled system matrices are square and symmetric.
struct CsrMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> row_ptr;  // size n_rows + 1
  std::vector<int> col_idx;  // size nnz
  std::vector<double> values;

  int nnz() const { return static_cast<int>(col_idx.size()); }

  /// y = A x
  void apply(const Vec& x, Vec& y) const;
  Vec apply(const Vec& x) const;

  /// Entry lookup by binary search within the row; 0 if not stored.
  double coeff(int i, int j) const;
  /// Pointer to a stored entry's value, nullptr if the entry is not in the pattern.
  double* find(int i, int j);

  Vec diagonal() const;
  CsrMatrix transposed() const;
  Mat to_dense() const;

  /// max_ij |A_ij - A_ji| relative to the largest entry magnitude.
  double symmetry_error() const;

  /// Build from (i, j, v) triplets; duplicates are summed.
  static CsrMatrix from_triplets(int n_rows, int n_cols,
                                 std::vector<std::array<int, 2>> pattern,
                                 const std::vector<double>& vals);

  /// Build a square matrix with a given sparsity pattern, values zeroed.
  /// `row_cols[i]` must be sorted and unique.
  static CsrMatrix from_pattern(std::vector<std::vector<int>> row_cols);
};

/// C = A * B (CSR general matrix-matrix product).
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);

/// C = alpha*A + beta*B; patterns may differ.
CsrMatrix add(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b);

/// Extract A(rows, cols) as CSR. Index vectors map block position -> parent index.
CsrMatrix extract_block(const CsrMatrix& a, const std::vector<int>& rows,
                        const std::vector<int>& cols);

/// Matrix Market coordinate format (general, 1-based), for debugging dumps.
void write_matrix_market(const CsrMatrix& a, const std::string& path);

}  // namespace eqs
