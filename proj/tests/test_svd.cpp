#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "oddlink/errors.hpp"
#include "oddlink/graph.hpp"
#include "oddlink/svd.hpp"

using namespace oddlink;

namespace {

void check_orthonormal(const std::vector<double>& vectors, std::size_t n,
                       std::size_t k, double tol = 1e-8) {
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += vectors[i * k + a] * vectors[i * k + b];
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < tol);
    }
  }
}

}  // namespace

TEST_CASE("truncated_svd of a diagonal matrix") {
  SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{0, 0, 3.0}, {1, 1, 2.0}});
  SvdOptions o;
  o.rank = 2;
  SvdModel model = truncated_svd(m, o);
  CHECK(model.singular_values[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(model.singular_values[1] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("truncated_svd of all-ones 2x2, rank 1") {
  SparseMatrix m = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
  SvdOptions o;
  o.rank = 1;
  SvdModel model = truncated_svd(m, o);
  CHECK(model.singular_values[0] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("truncated_svd matches dense SVD oracle on random sparse 50x40") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SparseMatrix m = testutil::random_sparse(50, 40, 0.15, seed);
    SvdOptions o;
    o.rank = 10;
    o.seed = seed + 1;
    SvdModel model = truncated_svd(m, o);

    Eigen::MatrixXd dense = testutil::to_dense(m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
    for (std::size_t i = 0; i < 10; ++i) {
      double expect = svd.singularValues()(static_cast<Eigen::Index>(i));
      CHECK(std::abs(model.singular_values[i] - expect) <=
            1e-6 * std::max(expect, 1e-12));
    }
    check_orthonormal(model.left_vectors, 50, 10);
    check_orthonormal(model.right_vectors, 40, 10);
  }
}

TEST_CASE("truncated_svd is deterministic under the seed") {
  SparseMatrix m = testutil::random_sparse(30, 20, 0.2, 3);
  SvdOptions o;
  o.rank = 5;
  o.seed = 77;
  SvdModel a = truncated_svd(m, o);
  SvdModel b = truncated_svd(m, o);
  CHECK(a.singular_values == b.singular_values);
  CHECK(a.left_vectors == b.left_vectors);
}

TEST_CASE("full-rank reconstruction of small biadjacency matrices") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    BipartiteGraph g = testutil::random_bipartite(seed, 8, 8);
    SvdModel model = testutil::full_rank_model(g, seed + 1);
    SparseMatrix b = biadjacency(g);
    for (std::size_t u = 0; u < g.left_count; ++u) {
      for (std::size_t w = 0; w < g.right_count; ++w) {
        double rec = 0.0;
        for (std::size_t i = 0; i < model.rank; ++i) {
          rec += model.singular_values[i] * model.left(u, i) * model.right(w, i);
        }
        CHECK(std::abs(rec - b.coeff(u, w)) < 1e-8);
      }
    }
  }
}

TEST_CASE("truncated_svd rejects invalid ranks") {
  SparseMatrix m = testutil::random_sparse(5, 4, 0.5, 1);
  SvdOptions o;
  o.rank = 5;
  CHECK_THROWS_AS((void)truncated_svd(m, o), std::invalid_argument);
  o.rank = 0;
  CHECK_THROWS_AS((void)truncated_svd(m, o), std::invalid_argument);
}

TEST_CASE("extremal_eigs of the 2-cycle") {
  SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  EigenOptions o;
  o.top = 1;
  o.bottom = 1;
  EigenModel e = extremal_eigs(m, o);
  std::vector<double> vals = e.eigenvalues;
  std::sort(vals.begin(), vals.end());
  CHECK(vals[0] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(vals[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("extremal_eigs of the triangle matches the dense oracle") {
  SparseMatrix m = SparseMatrix::from_triplets(
      3, 3, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}, {0, 2, 1.0}, {2, 0, 1.0}});
  EigenOptions o;
  o.top = 1;
  o.bottom = 2;
  EigenModel e = extremal_eigs(m, o);
  std::vector<double> vals = e.eigenvalues;
  std::sort(vals.begin(), vals.end());
  CHECK(vals[0] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(vals[1] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(vals[2] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("block adjacency spectrum equals +/- singular values") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    BipartiteGraph g = testutil::random_bipartite(seed + 50, 8, 8);
    SvdModel model = testutil::full_rank_model(g, seed);
    SparseMatrix a = block_adjacency(g);
    std::size_t n = a.rows();
    EigenOptions o;
    o.top = n / 2;
    o.bottom = n - n / 2;
    EigenModel e = extremal_eigs(a, o);

    std::vector<double> expect;
    for (double s : model.singular_values) {
      expect.push_back(s);
      expect.push_back(-s);
    }
    while (expect.size() < n) expect.push_back(0.0);
    std::sort(expect.begin(), expect.end());
    std::vector<double> got = e.eigenvalues;
    std::sort(got.begin(), got.end());
    REQUIRE(got.size() == expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::abs(got[i] - expect[i]) < 1e-8);
    }
  }
}

TEST_CASE("extremal_eigs residuals and orthonormality") {
  SparseMatrix a = block_adjacency(testutil::random_bipartite(123, 10, 10));
  EigenOptions o;
  o.top = 3;
  o.bottom = 3;
  EigenModel e = extremal_eigs(a, o);
  std::size_t n = a.rows(), m = e.eigenvalues.size();
  check_orthonormal(e.vectors, n, m);
  // sorted by descending |lambda|
  for (std::size_t i = 0; i + 1 < m; ++i) {
    CHECK(std::abs(e.eigenvalues[i]) >= std::abs(e.eigenvalues[i + 1]) - 1e-12);
  }
  std::vector<double> x(n);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t r = 0; r < n; ++r) x[r] = e.vec(r, c);
    std::vector<double> ax = a.multiply(x);
    double rnorm = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double d = ax[r] - e.eigenvalues[c] * x[r];
      rnorm += d * d;
    }
    CHECK(std::sqrt(rnorm) < 1e-7);
  }
}

TEST_CASE("extremal_eigs rejects asymmetric input") {
  SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}});
  EigenOptions o;
  o.top = 1;
  o.bottom = 1;
  CHECK_THROWS_AS((void)extremal_eigs(m, o), std::invalid_argument);
}
