#include "oddlink/sparse.hpp"

#include <algorithm>
#include <stdexcept>

#include "oddlink/errors.hpp"

namespace oddlink {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw std::out_of_range("sparse triplet out of range");
    }
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_offsets_.assign(1, 0);
  m.row_offsets_.reserve(rows + 1);

  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < triplets.size() && triplets[i].row == r) {
      double v = triplets[i].value;
      std::size_t c = triplets[i].col;
      ++i;
      while (i < triplets.size() && triplets[i].row == r &&
             triplets[i].col == c) {
        v += triplets[i].value;
        ++i;
      }
      if (v != 0.0) {
        m.col_indices_.push_back(c);
        m.values_.push_back(v);
      }
    }
    m.row_offsets_.push_back(m.col_indices_.size());
  }
  return m;
}

double SparseMatrix::coeff(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) {
    throw std::out_of_range("sparse coeff out of range");
  }
  auto begin = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row]);
  auto end = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row + 1]);
  auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) {
    throw std::invalid_argument("spmv: vector length does not match columns");
  }
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i) {
      acc += values_[i] * x[col_indices_[i]];
    }
    y[r] = acc;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(
    std::span<const double> x) const {
  if (x.size() != rows_) {
    throw std::invalid_argument("spmv^T: vector length does not match rows");
  }
  std::vector<double> y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i) {
      y[col_indices_[i]] += values_[i] * xr;
    }
  }
  return y;
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i) {
      if (coeff(col_indices_[i], r) != values_[i]) return false;
    }
  }
  return true;
}

}  // namespace oddlink
