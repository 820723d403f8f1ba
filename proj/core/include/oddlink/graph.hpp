#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oddlink/sparse.hpp"

namespace oddlink {

struct Edge {
  std::uint32_t left;
  std::uint32_t right;
  std::optional<std::int64_t> timestamp;
};

/// Immutable bipartite graph. Node ids are dense 0-based indices per
/// partition; the original labels from the input file are retained so
/// predictions can be reported against them.
struct BipartiteGraph {
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  std::vector<Edge> edges;
  std::vector<std::uint32_t> left_degrees;
  std::vector<std::uint32_t> right_degrees;
  std::vector<std::string> left_labels;
  std::vector<std::string> right_labels;

  std::size_t edge_count() const { return edges.size(); }
  bool has_timestamps() const;

  /// Recomputes degrees and validates index ranges and uniqueness.
  static BipartiteGraph from_edges(std::size_t left_count,
                                   std::size_t right_count,
                                   std::vector<Edge> edges);
};

struct UnipartiteGraph {
  std::size_t node_count = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // u < v
  std::vector<std::string> labels;

  std::size_t edge_count() const { return edges.size(); }
};

enum class Side { kLeft, kRight };

struct ParseOptions {
  bool has_weight = false;
  bool has_timestamp = false;
  /// When set, any parsed weight different from 1 is an error.
  bool strict_unweighted = false;
};

/// Parses a whitespace-separated edge list ("<u> <v> [weight [timestamp]]",
/// '%'/'#' comment lines). Weights are validated and discarded; duplicate
/// (u, v) pairs collapse to the earliest timestamp, else first occurrence.
BipartiteGraph parse_bipartite(std::istream& in, const ParseOptions& options = {});

/// Parses an undirected unipartite edge list. Self-loops are dropped and
/// (u,v)/(v,u) duplicates collapse. Columns beyond the first two are ignored.
UnipartiteGraph parse_unipartite(std::istream& in);

/// Canonical serialization of the deduplicated edge set (original labels,
/// timestamps when present).
void write_edge_list(std::ostream& out, const BipartiteGraph& g);

struct SplitResult {
  BipartiteGraph train;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> test_edges;
  std::uint64_t seed = 0;
  bool by_time = false;
};

/// Withholds ceil(fraction * |E|) edges as the test set. With by_time the
/// newest edges are withheld (ties by input order, later lines newer);
/// otherwise a seeded uniform draw. Deterministic for fixed inputs.
SplitResult split_edges(const BipartiteGraph& g, double fraction,
                        std::uint64_t seed, bool by_time);

struct UnipartiteSplit {
  UnipartiteGraph train;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> test_edges;
};

UnipartiteSplit split_unipartite(const UnipartiteGraph& g, double fraction,
                                 std::uint64_t seed);

std::uint32_t degree(const BipartiteGraph& g, Side side, std::size_t id);

/// left_count x right_count 0/1 matrix B.
SparseMatrix biadjacency(const BipartiteGraph& g);

/// Symmetric (left+right)^2 matrix [0 B; B^T 0].
SparseMatrix block_adjacency(const BipartiteGraph& g);

/// Symmetric 0/1 adjacency of a unipartite graph.
SparseMatrix adjacency(const UnipartiteGraph& g);

}  // namespace oddlink
