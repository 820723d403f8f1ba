#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oddlink {

/// Row-compressed sparse real matrix. Column indices are sorted within
/// each row and explicit zeros are dropped on construction.
class SparseMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;

  /// Builds a rows x cols matrix from (row, col, value) triplets.
  /// Duplicate coordinates are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  /// Entry lookup by binary search within the row; 0.0 when absent.
  double coeff(std::size_t row, std::size_t col) const;

  /// y = M x. Throws on dimension mismatch.
  std::vector<double> multiply(std::span<const double> x) const;

  /// y = M^T x. Throws on dimension mismatch.
  std::vector<double> multiply_transpose(std::span<const double> x) const;

  /// Exact structural and numerical symmetry (requires square).
  bool is_symmetric() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

}  // namespace oddlink
