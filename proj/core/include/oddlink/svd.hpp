#pragma once

#include <cstdint>
#include <vector>

#include "oddlink/sparse.hpp"

namespace oddlink {

struct SvdOptions {
  std::size_t rank = 32;
  double tol = 1e-8;
  std::size_t max_iter = 1000;
  std::uint64_t seed = 1;
};

/// Truncated singular factors of a biadjacency matrix: B ~ U diag(sigma) V^T
/// with sigma nonincreasing and orthonormal factor columns.
struct SvdModel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t rank = 0;
  std::vector<double> singular_values;  // rank entries, nonincreasing
  std::vector<double> left_vectors;     // rows x rank, row-major
  std::vector<double> right_vectors;    // cols x rank, row-major
  std::uint64_t seed = 0;

  double left(std::size_t i, std::size_t j) const {
    return left_vectors[i * rank + j];
  }
  double right(std::size_t i, std::size_t j) const {
    return right_vectors[i * rank + j];
  }
};

/// Top-k singular triplets by Golub-Kahan-Lanczos bidiagonalization with
/// full reorthogonalization; restarts with a fresh seeded vector on
/// breakdown. Singular values below 1e-10 * sigma_1 are truncated to 0.
SvdModel truncated_svd(const SparseMatrix& m, const SvdOptions& options = {});

struct EigenOptions {
  std::size_t top = 16;     // largest (signed) eigenvalues
  std::size_t bottom = 16;  // smallest (signed) eigenvalues
  double tol = 1e-8;
  std::size_t max_iter = 1000;
  std::uint64_t seed = 1;
};

/// Extremal eigenpairs, sorted by descending |lambda|.
struct EigenModel {
  std::size_t n = 0;
  std::vector<double> eigenvalues;
  std::vector<double> vectors;  // n x m, row-major

  double vec(std::size_t i, std::size_t j) const {
    return vectors[i * eigenvalues.size() + j];
  }
};

/// Extremal eigenpairs of a symmetric sparse matrix via Lanczos with full
/// reorthogonalization (both spectrum ends).
EigenModel extremal_eigs(const SparseMatrix& m, const EigenOptions& options = {});

}  // namespace oddlink
