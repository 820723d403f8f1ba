#pragma once

// shared fixtures for the unit and acceptance suites

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "oddlink/graph.hpp"
#include "oddlink/sparse.hpp"
#include "oddlink/svd.hpp"

namespace testutil {

inline Eigen::MatrixXd to_dense(const oddlink::SparseMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.rows()),
                                            static_cast<Eigen::Index>(m.cols()));
  auto offsets = m.row_offsets();
  auto cols = m.col_indices();
  auto vals = m.values();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t i = offsets[r]; i < offsets[r + 1]; ++i) {
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[i])) = vals[i];
    }
  }
  return d;
}

inline oddlink::BipartiteGraph random_bipartite(std::uint64_t seed,
                                                std::size_t max_left = 10,
                                                std::size_t max_right = 10) {
  std::mt19937_64 rng(seed);
  std::size_t left = 2 + rng() % (max_left - 1);
  std::size_t right = 2 + rng() % (max_right - 1);
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  std::vector<oddlink::Edge> edges;
  std::size_t want = 1 + rng() % (left * right);
  while (edges.size() < want) {
    std::uint32_t u = rng() % left, w = rng() % right;
    if (seen.emplace(u, w).second) edges.push_back({u, w, std::nullopt});
  }
  return oddlink::BipartiteGraph::from_edges(left, right, std::move(edges));
}

inline oddlink::SparseMatrix random_sparse(std::size_t rows, std::size_t cols,
                                           double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<oddlink::SparseMatrix::Triplet> t;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (coin(rng) < density) t.push_back({i, j, val(rng)});
    }
  }
  return oddlink::SparseMatrix::from_triplets(rows, cols, std::move(t));
}

/// Full-rank model of a graph's biadjacency.
inline oddlink::SvdModel full_rank_model(const oddlink::BipartiteGraph& g,
                                         std::uint64_t seed = 1) {
  oddlink::SvdOptions o;
  o.rank = std::min(g.left_count, g.right_count);
  o.seed = seed;
  return oddlink::truncated_svd(oddlink::biadjacency(g), o);
}

}  // namespace testutil
