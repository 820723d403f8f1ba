#include "oddlink/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "oddlink/errors.hpp"
#include "oddlink/transforms.hpp"

namespace oddlink {

namespace {

BipartiteGraph mirrored(const BipartiteGraph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const Edge& e : g.edges) edges.push_back(Edge{e.right, e.left, e.timestamp});
  BipartiteGraph m = BipartiteGraph::from_edges(g.right_count, g.left_count,
                                                std::move(edges));
  m.left_labels = g.right_labels;
  m.right_labels = g.left_labels;
  return m;
}

std::string basename_of(const std::string& path) {
  auto pos = path.find_last_of("/\\");
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

}  // namespace

double average_precision(std::span<const std::size_t> ranked,
                         const std::unordered_set<std::size_t>& relevant) {
  if (relevant.empty()) {
    throw std::invalid_argument("average_precision: relevant set is empty");
  }
  std::unordered_set<std::size_t> seen;
  seen.reserve(ranked.size());
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t p = 0; p < ranked.size(); ++p) {
    if (!seen.insert(ranked[p]).second) {
      throw std::invalid_argument("average_precision: duplicate ranked item");
    }
    if (relevant.count(ranked[p])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

MethodEval evaluate_method(
    const BipartiteGraph& train,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& test_edges,
    const std::function<std::vector<double>(std::uint32_t)>& score_row_fn,
    const EvalConfig& config) {
  if (test_edges.empty()) {
    throw std::invalid_argument("evaluate_method: no test edges");
  }

  std::vector<std::vector<std::uint32_t>> relevant_of(train.left_count);
  for (const auto& [u, w] : test_edges) relevant_of[u].push_back(w);

  std::vector<std::vector<std::uint32_t>> train_neighbors(train.left_count);
  for (const Edge& e : train.edges) train_neighbors[e.left].push_back(e.right);
  for (auto& v : train_neighbors) std::sort(v.begin(), v.end());

  std::vector<std::uint32_t> users;
  for (std::uint32_t u = 0; u < train.left_count; ++u) {
    if (!relevant_of[u].empty()) users.push_back(u);
  }
  if (users.empty()) {
    throw std::invalid_argument("evaluate_method: no test users");
  }

  std::vector<double> ap(users.size(), 0.0);
  std::vector<char> skipped(users.size(), 0);

  auto eval_user = [&](std::size_t idx) {
    std::uint32_t u = users[idx];
    const auto& excl = train_neighbors[u];
    std::unordered_set<std::size_t> relevant(relevant_of[u].begin(),
                                             relevant_of[u].end());

    std::vector<std::size_t> candidates;
    candidates.reserve(train.right_count - excl.size());
    for (std::size_t w = 0; w < train.right_count; ++w) {
      if (!std::binary_search(excl.begin(), excl.end(),
                              static_cast<std::uint32_t>(w))) {
        candidates.push_back(w);
      }
    }
    if (candidates.empty()) {
      skipped[idx] = 1;
      return;
    }

    if (config.candidate_cap && candidates.size() > *config.candidate_cap) {
      // seeded sample that always keeps the relevant items
      std::vector<std::size_t> kept, pool;
      for (std::size_t w : candidates) {
        (relevant.count(w) ? kept : pool).push_back(w);
      }
      std::size_t cap = std::max(*config.candidate_cap, kept.size());
      std::size_t need = cap - kept.size();
      std::mt19937_64 rng(config.seed * 0x9E3779B97F4A7C15ull + u);
      for (std::size_t i = 0; i < need && i < pool.size(); ++i) {
        std::size_t j = i + rng() % (pool.size() - i);
        std::swap(pool[i], pool[j]);
        kept.push_back(pool[i]);
      }
      std::sort(kept.begin(), kept.end());
      candidates = std::move(kept);
    }

    std::vector<double> scores = score_row_fn(u);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&scores](std::size_t a, std::size_t b) {
                       if (scores[a] != scores[b]) return scores[a] > scores[b];
                       return a < b;
                     });
    ap[idx] = average_precision(candidates, relevant);
  };

  std::size_t threads = std::max<std::size_t>(config.threads, 1);
  if (threads == 1 || users.size() < 2 * threads) {
    for (std::size_t i = 0; i < users.size(); ++i) eval_user(i);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (users.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      std::size_t lo = t * chunk;
      std::size_t hi = std::min(lo + chunk, users.size());
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi]() {
        for (std::size_t i = lo; i < hi; ++i) eval_user(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  // fixed-order reduction for determinism
  MethodEval result;
  double sum = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (skipped[i]) {
      ++result.users_skipped;
    } else {
      sum += ap[i];
      ++result.users_evaluated;
    }
  }
  if (result.users_evaluated == 0) {
    throw std::invalid_argument("evaluate_method: all users skipped");
  }
  result.map = sum / static_cast<double>(result.users_evaluated);
  return result;
}

EvalReport run_experiment(const BipartiteGraph& input, const std::string& name,
                          const EvalConfig& config) {
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0) ||
      !(config.inner_fraction > 0.0 && config.inner_fraction < 1.0)) {
    throw std::invalid_argument("run_experiment: fractions must be in (0,1)");
  }
  const BipartiteGraph g = config.evaluate_right ? mirrored(input) : input;

  bool by_time = config.by_time_if_available && g.has_timestamps();
  SplitResult outer = split_edges(g, config.test_fraction, config.seed, by_time);
  SplitResult inner =
      split_edges(outer.train, config.inner_fraction, config.seed + 1,
                  by_time && outer.train.has_timestamps());

  std::size_t k_eff =
      std::min(config.rank, std::min(g.left_count, g.right_count));
  SvdOptions svd_options{k_eff, config.svd_tol, config.svd_max_iter, config.seed};

  SvdModel inner_model = truncated_svd(biadjacency(inner.train), svd_options);

  std::vector<SparseMatrix::Triplet> holdout_triplets;
  holdout_triplets.reserve(inner.test_edges.size());
  for (const auto& [u, w] : inner.test_edges) holdout_triplets.push_back({u, w, 1.0});
  SparseMatrix holdout = SparseMatrix::from_triplets(
      g.left_count, g.right_count, std::move(holdout_triplets));

  FitTargets targets = build_targets(inner_model, holdout);
  FitOptions fit_options;
  fit_options.poly_degree = config.poly_degree;

  std::vector<std::string> spectral;
  for (const std::string& m : config.methods) {
    if (m != "pref") spectral.push_back(m);
  }
  std::vector<FitOutcome> fits = fit_all(spectral, targets, fit_options);
  std::unordered_map<std::string, const FitOutcome*> fit_of;
  for (const FitOutcome& f : fits) fit_of[f.family] = &f;

  SvdModel full_model = truncated_svd(biadjacency(outer.train), svd_options);

  std::vector<double> right_degrees(outer.train.right_count);
  for (std::size_t w = 0; w < outer.train.right_count; ++w) {
    right_degrees[w] = outer.train.right_degrees[w];
  }
  double inv_2e = 1.0 / (2.0 * static_cast<double>(outer.train.edge_count()));

  EvalReport report;
  report.dataset = name;
  report.nodes = g.left_count + g.right_count;
  report.edges = g.edge_count();
  report.rank = k_eff;
  report.seed = config.seed;
  report.by_time = by_time;
  report.test_fraction = config.test_fraction;
  report.inner_fraction = config.inner_fraction;
  report.candidate_cap = config.candidate_cap;

  for (const std::string& method : config.methods) {
    MethodResult r;
    r.method = method;
    auto start = std::chrono::steady_clock::now();
    try {
      std::function<std::vector<double>(std::uint32_t)> score_row_fn;
      if (method == "pref") {
        score_row_fn = [&](std::uint32_t u) {
          double du = outer.train.left_degrees[u];
          std::vector<double> row(right_degrees.size());
          for (std::size_t w = 0; w < row.size(); ++w) {
            row[w] = du * right_degrees[w] * inv_2e;
          }
          return row;
        };
      } else {
        const FitOutcome* outcome = fit_of.at(method);
        if (!outcome->report) {
          throw NumericalError("fit failed: " + outcome->error);
        }
        // the inner-split parameters transfer; re-fitting on the full
        // training model would leak the inner holdout
        const SpectralTransform& t = outcome->report->transform;
        r.params = serialize_transform(t);
        score_row_fn = [&full_model, &t](std::uint32_t u) {
          return score_row(full_model, t, u);
        };
      }
      MethodEval eval = evaluate_method(outer.train, outer.test_edges,
                                        score_row_fn, config);
      r.ok = true;
      r.map = eval.map;
      r.users_evaluated = eval.users_evaluated;
      r.users_skipped = eval.users_skipped;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
    report.methods.push_back(std::move(r));
  }
  return report;
}

EvalReport run_experiment(const std::string& dataset_path,
                          const ParseOptions& parse_options,
                          const EvalConfig& config) {
  std::ifstream in(dataset_path);
  if (!in) throw ParseError("cannot open dataset: " + dataset_path);
  BipartiteGraph g = parse_bipartite(in, parse_options);
  return run_experiment(g, basename_of(dataset_path), config);
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "dataset,nodes,edges";
  for (const MethodResult& m : report.methods) out << ',' << m.method;
  out << '\n';
  out << report.dataset << ',' << report.nodes << ',' << report.edges;
  char buf[64];
  for (const MethodResult& m : report.methods) {
    if (m.ok) {
      std::snprintf(buf, sizeof(buf), ",%.6g", m.map);
      out << buf;
    } else {
      out << ",NA";
    }
  }
  out << '\n';
}

void write_report_table(std::ostream& out, const EvalReport& report) {
  out << std::left << std::setw(24) << "Dataset" << std::right << std::setw(10)
      << "Nodes" << std::setw(12) << "Edges";
  for (const MethodResult& m : report.methods) {
    out << std::setw(std::max<std::size_t>(m.method.size() + 2, 10)) << m.method;
  }
  out << '\n';
  out << std::left << std::setw(24) << report.dataset << std::right
      << std::setw(10) << report.nodes << std::setw(12) << report.edges;
  char buf[64];
  for (const MethodResult& m : report.methods) {
    std::size_t width = std::max<std::size_t>(m.method.size() + 2, 10);
    if (m.ok) {
      std::snprintf(buf, sizeof(buf), "%.6g", m.map);
      out << std::setw(static_cast<int>(width)) << buf;
    } else {
      out << std::setw(static_cast<int>(width)) << "NA";
    }
  }
  out << '\n';
}

}  // namespace oddlink
