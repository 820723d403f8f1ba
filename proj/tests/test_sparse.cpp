#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "oddlink/sparse.hpp"

using oddlink::SparseMatrix;

namespace {

// dense mirror used as the multiplication oracle
struct Dense {
  std::size_t rows, cols;
  std::vector<double> a;
  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

std::pair<SparseMatrix, Dense> random_sparse(std::size_t rows, std::size_t cols,
                                             double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Dense d{rows, cols, std::vector<double>(rows * cols, 0.0)};
  std::vector<SparseMatrix::Triplet> t;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (coin(rng) < density) {
        double v = val(rng);
        d.at(i, j) = v;
        t.push_back({i, j, v});
      }
    }
  }
  return {SparseMatrix::from_triplets(rows, cols, std::move(t)), std::move(d)};
}

}  // namespace

TEST_CASE("spmv on a 2x2 permutation") {
  SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  std::vector<double> x{1.0, 0.0};
  std::vector<double> y = m.multiply(x);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 1.0);
}

TEST_CASE("spmv of the zero matrix") {
  SparseMatrix m = SparseMatrix::from_triplets(3, 4, {});
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  for (double v : m.multiply(x)) CHECK(v == 0.0);
  CHECK(m.nnz() == 0);
}

TEST_CASE("spmv matches a dense oracle on random 20x15 matrices") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto [m, d] = random_sparse(20, 15, 0.2, seed);
    std::mt19937_64 rng(seed + 100);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<double> x(15);
    for (double& v : x) v = val(rng);

    std::vector<double> y = m.multiply(x);
    for (std::size_t i = 0; i < 20; ++i) {
      double expect = 0.0;
      for (std::size_t j = 0; j < 15; ++j) expect += d.at(i, j) * x[j];
      CHECK(std::abs(y[i] - expect) < 1e-12);
    }

    std::vector<double> xt(20);
    for (double& v : xt) v = val(rng);
    std::vector<double> yt = m.multiply_transpose(xt);
    for (std::size_t j = 0; j < 15; ++j) {
      double expect = 0.0;
      for (std::size_t i = 0; i < 20; ++i) expect += d.at(i, j) * xt[i];
      CHECK(std::abs(yt[j] - expect) < 1e-12);
    }
  }
}

TEST_CASE("spmv rejects dimension mismatch") {
  SparseMatrix m = SparseMatrix::from_triplets(2, 3, {{0, 0, 1.0}});
  std::vector<double> x{1.0, 2.0};
  CHECK_THROWS_AS((void)m.multiply(x), std::invalid_argument);
}

TEST_CASE("duplicate triplets are summed, zeros dropped") {
  SparseMatrix m = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 1, 1.0}, {1, 1, -1.0}});
  CHECK(m.coeff(0, 0) == 3.0);
  CHECK(m.nnz() == 1);
}

TEST_CASE("symmetry detection") {
  SparseMatrix sym = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  CHECK(sym.is_symmetric());
  SparseMatrix asym = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}});
  CHECK(!asym.is_symmetric());
}
