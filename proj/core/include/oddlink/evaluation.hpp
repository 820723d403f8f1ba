#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "oddlink/fitting.hpp"
#include "oddlink/graph.hpp"

namespace oddlink {

struct EvalConfig {
  double test_fraction = 0.30;
  double inner_fraction = 0.30;
  std::uint64_t seed = 1;
  std::size_t rank = 32;
  std::optional<std::size_t> candidate_cap;
  std::vector<std::string> methods{"poly", "nnpoly", "sinh",
                                   "reduction", "neumann", "pref"};
  bool evaluate_right = false;  // swap partitions for ambiguous orientations
  bool by_time_if_available = true;
  unsigned poly_degree = 3;
  std::size_t threads = 1;
  double svd_tol = 1e-8;
  std::size_t svd_max_iter = 1000;
};

/// AP = (1/|relevant|) sum over relevant positions p of (hits up to p)/p.
/// Relevant items absent from the ranking contribute 0.
double average_precision(std::span<const std::size_t> ranked,
                         const std::unordered_set<std::size_t>& relevant);

struct MethodEval {
  double map = 0.0;
  std::size_t users_evaluated = 0;
  std::size_t users_skipped = 0;  // empty candidate set after exclusion
};

/// Scores one method over all left nodes with test edges. `score_row_fn`
/// maps a left node to scores over every right node.
MethodEval evaluate_method(
    const BipartiteGraph& train,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& test_edges,
    const std::function<std::vector<double>(std::uint32_t)>& score_row_fn,
    const EvalConfig& config);

struct MethodResult {
  std::string method;
  bool ok = false;
  double map = 0.0;
  std::string params;  // serialized fitted transform, empty for pref
  std::string error;
  double seconds = 0.0;
  std::size_t users_evaluated = 0;
  std::size_t users_skipped = 0;
};

struct EvalReport {
  std::string dataset;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t rank = 0;
  std::uint64_t seed = 0;
  bool by_time = false;
  double test_fraction = 0.0;
  double inner_fraction = 0.0;
  std::optional<std::size_t> candidate_cap;
  std::vector<MethodResult> methods;
};

/// Full holdout protocol: outer split, inner split, SVD + curve fit on the
/// inner split, transform reuse on the full-training SVD, MAP per method.
EvalReport run_experiment(const BipartiteGraph& g, const std::string& name,
                          const EvalConfig& config);

EvalReport run_experiment(const std::string& dataset_path,
                          const ParseOptions& parse_options,
                          const EvalConfig& config);

/// One CSV row per dataset: dataset, nodes, edges, then one MAP column per
/// method.
void write_report_csv(std::ostream& out, const EvalReport& report);

/// Aligned text table of the same shape.
void write_report_table(std::ostream& out, const EvalReport& report);

}  // namespace oddlink
