#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oddlink {

/// Minimal dense row-major matrix for small projected problems. Not a
/// general linear algebra type; sized for Krylov subspace dimensions.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static DenseMatrix identity(std::size_t n);
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// On return `values[i]` / column i of `vectors` are sorted by descending
/// eigenvalue.
void jacobi_eigh(const DenseMatrix& a, std::vector<double>& values,
                 DenseMatrix& vectors);

/// One-sided Jacobi SVD, A = U diag(s) V^T with s sorted descending.
/// Accurate for small singular values; intended for projected bidiagonal
/// factors. Columns of U belonging to (numerically) zero singular values
/// are completed to an orthonormal set.
void jacobi_svd(const DenseMatrix& a, DenseMatrix& u, std::vector<double>& s,
                DenseMatrix& v);

/// Least squares min ||A c - b||_2 via column-equilibrated normal
/// equations; adequate for the small fitting designs used here.
std::vector<double> solve_least_squares(const DenseMatrix& a,
                                        std::span<const double> b);

}  // namespace oddlink
