#include "oddlink/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "oddlink/errors.hpp"

namespace oddlink {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) fields.push_back(tok);
  return fields;
}

double parse_double_field(const std::string& s, std::size_t line_no,
                          const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                     " '" + s + "'");
  }
}

std::int64_t parse_int_field(const std::string& s, std::size_t line_no,
                             const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // KONECT files sometimes carry timestamps in scientific notation.
    double d = parse_double_field(s, line_no, what);
    return static_cast<std::int64_t>(d);
  }
  return v;
}

std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& map,
                     std::vector<std::string>& labels, const std::string& key) {
  auto [it, inserted] = map.emplace(key, static_cast<std::uint32_t>(labels.size()));
  if (inserted) labels.push_back(key);
  return it->second;
}

// Fisher-Yates with an explicit generator so splits are stable across
// standard library implementations.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

bool BipartiteGraph::has_timestamps() const {
  if (edges.empty()) return false;
  return std::all_of(edges.begin(), edges.end(),
                     [](const Edge& e) { return e.timestamp.has_value(); });
}

BipartiteGraph BipartiteGraph::from_edges(std::size_t left_count,
                                          std::size_t right_count,
                                          std::vector<Edge> edges) {
  BipartiteGraph g;
  g.left_count = left_count;
  g.right_count = right_count;
  g.left_degrees.assign(left_count, 0);
  g.right_degrees.assign(right_count, 0);
  for (const Edge& e : edges) {
    if (e.left >= left_count || e.right >= right_count) {
      throw std::out_of_range("edge index out of range");
    }
    ++g.left_degrees[e.left];
    ++g.right_degrees[e.right];
  }
  g.edges = std::move(edges);
  return g;
}

BipartiteGraph parse_bipartite(std::istream& in, const ParseOptions& options) {
  std::unordered_map<std::string, std::uint32_t> left_map, right_map;
  std::vector<std::string> left_labels, right_labels;
  // (left, right) -> index into edges, for duplicate collapsing
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::vector<Edge> edges;

  std::size_t expected = 2;
  if (options.has_weight) ++expected;
  if (options.has_timestamp) ++expected;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != expected) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(expected) + " columns, got " +
                       std::to_string(fields.size()));
    }
    std::uint32_t u = intern(left_map, left_labels, fields[0]);
    std::uint32_t w = intern(right_map, right_labels, fields[1]);
    std::size_t next = 2;
    if (options.has_weight) {
      double weight = parse_double_field(fields[next++], line_no, "weight");
      if (options.strict_unweighted && weight != 1.0) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": weighted edge in strict unweighted mode");
      }
    }
    std::optional<std::int64_t> ts;
    if (options.has_timestamp) {
      ts = parse_int_field(fields[next++], line_no, "timestamp");
    }

    std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | w;
    auto [it, inserted] = seen.emplace(key, edges.size());
    if (inserted) {
      edges.push_back(Edge{u, w, ts});
    } else if (ts && edges[it->second].timestamp &&
               *ts < *edges[it->second].timestamp) {
      // keep the earliest observation of a repeated pair
      edges[it->second].timestamp = ts;
    }
  }
  if (edges.empty()) throw ParseError("empty graph: no edges parsed");

  BipartiteGraph g = BipartiteGraph::from_edges(left_labels.size(),
                                                right_labels.size(),
                                                std::move(edges));
  g.left_labels = std::move(left_labels);
  g.right_labels = std::move(right_labels);
  return g;
}

UnipartiteGraph parse_unipartite(std::istream& in) {
  std::unordered_map<std::string, std::uint32_t> map;
  std::vector<std::string> labels;
  std::unordered_map<std::uint64_t, bool> seen;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected at least 2 columns");
    }
    std::uint32_t u = intern(map, labels, fields[0]);
    std::uint32_t v = intern(map, labels, fields[1]);
    if (u == v) continue;  // self-loop
    std::uint32_t a = std::min(u, v), b = std::max(u, v);
    std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (seen.emplace(key, true).second) edges.emplace_back(a, b);
  }
  if (edges.empty()) throw ParseError("empty graph: no edges parsed");

  UnipartiteGraph g;
  g.node_count = labels.size();
  g.edges = std::move(edges);
  g.labels = std::move(labels);
  return g;
}

void write_edge_list(std::ostream& out, const BipartiteGraph& g) {
  for (const Edge& e : g.edges) {
    const std::string& lu = g.left_labels.empty()
                                ? std::to_string(e.left)
                                : g.left_labels[e.left];
    const std::string& rw = g.right_labels.empty()
                                ? std::to_string(e.right)
                                : g.right_labels[e.right];
    out << lu << '\t' << rw;
    if (e.timestamp) out << '\t' << *e.timestamp;
    out << '\n';
  }
}

SplitResult split_edges(const BipartiteGraph& g, double fraction,
                        std::uint64_t seed, bool by_time) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split fraction must be in (0,1)");
  }
  std::size_t n = g.edge_count();
  std::size_t n_test = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n)));
  if (n_test < 1) {
    throw std::invalid_argument("fraction * |E| must be at least 1");
  }
  if (by_time && !g.has_timestamps()) {
    throw std::invalid_argument("by_time split requires timestamps on all edges");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (by_time) {
    std::stable_sort(order.begin(), order.end(),
                     [&g](std::size_t a, std::size_t b) {
                       return *g.edges[a].timestamp < *g.edges[b].timestamp;
                     });
  } else {
    deterministic_shuffle(order, seed);
  }

  std::vector<bool> in_test(n, false);
  for (std::size_t i = n - n_test; i < n; ++i) in_test[order[i]] = true;

  std::vector<Edge> train_edges;
  train_edges.reserve(n - n_test);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> test_edges;
  test_edges.reserve(n_test);
  for (std::size_t i = 0; i < n; ++i) {
    if (in_test[i]) {
      test_edges.emplace_back(g.edges[i].left, g.edges[i].right);
    } else {
      train_edges.push_back(g.edges[i]);
    }
  }

  SplitResult result;
  result.train = BipartiteGraph::from_edges(g.left_count, g.right_count,
                                            std::move(train_edges));
  result.train.left_labels = g.left_labels;
  result.train.right_labels = g.right_labels;
  result.test_edges = std::move(test_edges);
  result.seed = seed;
  result.by_time = by_time;
  return result;
}

UnipartiteSplit split_unipartite(const UnipartiteGraph& g, double fraction,
                                 std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split fraction must be in (0,1)");
  }
  std::size_t n = g.edge_count();
  std::size_t n_test = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  deterministic_shuffle(order, seed);

  std::vector<bool> in_test(n, false);
  for (std::size_t i = n - n_test; i < n; ++i) in_test[order[i]] = true;

  UnipartiteSplit result;
  result.train.node_count = g.node_count;
  result.train.labels = g.labels;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_test[i]) {
      result.test_edges.push_back(g.edges[i]);
    } else {
      result.train.edges.push_back(g.edges[i]);
    }
  }
  return result;
}

std::uint32_t degree(const BipartiteGraph& g, Side side, std::size_t id) {
  const auto& degrees =
      side == Side::kLeft ? g.left_degrees : g.right_degrees;
  if (id >= degrees.size()) throw std::out_of_range("node id out of range");
  return degrees[id];
}

SparseMatrix biadjacency(const BipartiteGraph& g) {
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(g.edge_count());
  for (const Edge& e : g.edges) t.push_back({e.left, e.right, 1.0});
  return SparseMatrix::from_triplets(g.left_count, g.right_count, std::move(t));
}

SparseMatrix block_adjacency(const BipartiteGraph& g) {
  std::size_t n = g.left_count + g.right_count;
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(2 * g.edge_count());
  for (const Edge& e : g.edges) {
    std::size_t w = g.left_count + e.right;
    t.push_back({e.left, w, 1.0});
    t.push_back({w, e.left, 1.0});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix adjacency(const UnipartiteGraph& g) {
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(2 * g.edge_count());
  for (const auto& [u, v] : g.edges) {
    t.push_back({u, v, 1.0});
    t.push_back({v, u, 1.0});
  }
  return SparseMatrix::from_triplets(g.node_count, g.node_count, std::move(t));
}

}  // namespace oddlink
