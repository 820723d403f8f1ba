// Acceptance suite: one line per criterion. The final MovieLens check is
// diagnostic (the paper-scale tolerances depend on unspecified protocol
// details and the dataset may be absent); it never affects the exit code.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oddlink/bipartivity.hpp"
#include "oddlink/evaluation.hpp"
#include "oddlink/fitting.hpp"
#include "oddlink/graph.hpp"
#include "oddlink/nnls.hpp"
#include "oddlink/svd.hpp"
#include "oddlink/transforms.hpp"

using namespace oddlink;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail = "",
            bool diagnostic = false) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << name;
  if (!pass && !detail.empty()) std::cout << ": " << detail;
  if (diagnostic) std::cout << " (diagnostic, non-binding)";
  std::cout << '\n';
  if (!pass && !diagnostic) ++g_failures;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// dense eigendecomposition oracle: apply f to the block spectrum, read the
// top-right block
Eigen::MatrixXd oracle_scores(const BipartiteGraph& g, const SpectralTransform& t) {
  Eigen::MatrixXd a = testutil::to_dense(block_adjacency(g));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(testutil::to_dense(biadjacency(g)));
  std::vector<double> context(svd.singularValues().data(),
                              svd.singularValues().data() +
                                  svd.singularValues().size());
  Eigen::VectorXd f(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    f(i) = eval_transform(t, es.eigenvalues()(i), context);
  }
  Eigen::MatrixXd fa =
      es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
  return fa.topRightCorner(static_cast<Eigen::Index>(g.left_count),
                           static_cast<Eigen::Index>(g.right_count));
}

void criterion_spectral_oracle() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    BipartiteGraph g = testutil::random_bipartite(seed, 20, 20);
    SvdModel model = testutil::full_rank_model(g, seed + 1);
    // alphas scale with sigma_1 so sinh stays in range and the von Neumann
    // series stays inside its radius of convergence
    double s1 = model.singular_values[0];
    std::vector<SpectralTransform> families{
        Sinh{1.5 / s1, 1.2}, OddNeumann{0.9 / s1, 0.9},
        RankReduction{1 + seed % model.rank, 1.4},
        OddPolynomial{{0.8, 0.05, -0.002}}};
    for (const auto& t : families) {
      Eigen::MatrixXd expect = oracle_scores(g, t);
      for (std::size_t u = 0; u < g.left_count; ++u) {
        for (std::size_t w = 0; w < g.right_count; ++w) {
          double err = std::abs(score(model, t, u, w) -
                                expect(static_cast<Eigen::Index>(u),
                                       static_cast<Eigen::Index>(w)));
          worst = std::max(worst, err);
        }
      }
    }
  }
  report("spectral-oracle equivalence (50 graphs, 4 families, < 1e-8)",
         worst < 1e-8, "max abs error " + fmt(worst));
}

void criterion_block_identity() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    BipartiteGraph g = testutil::random_bipartite(seed, 20, 20);
    SvdModel model = testutil::full_rank_model(g, seed + 1);
    SparseMatrix a = block_adjacency(g);
    std::size_t n = a.rows();
    EigenOptions o;
    o.top = n / 2;
    o.bottom = n - n / 2;
    o.seed = seed + 3;
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
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(got[i] - expect[i]));
    }
  }
  report("block-identity: block spectrum = +/- singular values (< 1e-8)",
         worst < 1e-8, "max abs error " + fmt(worst));
}

void criterion_series_consistency() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    BipartiteGraph g = testutil::random_bipartite(seed + 500, 8, 7);
    SvdModel model = testutil::full_rank_model(g, seed + 1);
    double s1 = model.singular_values[0];
    if (s1 <= 0.0) continue;
    double alpha = 0.5 / s1;
    Eigen::MatrixXd a = testutil::to_dense(block_adjacency(g));
    for (const SpectralTransform& t :
         {SpectralTransform(Sinh{alpha, 1.0}),
          SpectralTransform(OddNeumann{alpha, 1.0})}) {
      auto weights = taylor_weights(t, 59);  // 30 odd terms
      Eigen::MatrixXd series =
          Eigen::MatrixXd::Zero(a.rows(), a.cols());
      Eigen::MatrixXd power = a;
      unsigned at = 1;
      for (auto [p, c] : weights) {
        while (at < p) {
          power = power * a;
          ++at;
        }
        series += c * power;
      }
      for (std::size_t u = 0; u < g.left_count; ++u) {
        for (std::size_t w = 0; w < g.right_count; ++w) {
          double err = std::abs(
              score(model, t, u, w) -
              series(static_cast<Eigen::Index>(u),
                     static_cast<Eigen::Index>(g.left_count + w)));
          worst = std::max(worst, err);
        }
      }
    }
  }
  report("series consistency: sinh/neumann vs 30 odd Taylor terms (< 1e-6)",
         worst < 1e-6, "max abs error " + fmt(worst));
}

void criterion_svd() {
  double worst_rel = 0.0, worst_ortho = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SparseMatrix m = testutil::random_sparse(50, 40, 0.12, seed + 900);
    SvdOptions o;
    o.rank = 10;
    o.seed = seed + 1;
    SvdModel model = truncated_svd(m, o);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(testutil::to_dense(m));
    for (std::size_t i = 0; i < 10; ++i) {
      double expect = svd.singularValues()(static_cast<Eigen::Index>(i));
      double rel = std::abs(model.singular_values[i] - expect) /
                   std::max(expect, 1e-300);
      worst_rel = std::max(worst_rel, rel);
    }
    for (int side = 0; side < 2; ++side) {
      const std::vector<double>& v =
          side == 0 ? model.left_vectors : model.right_vectors;
      std::size_t n = side == 0 ? 50 : 40;
      for (std::size_t a = 0; a < 10; ++a) {
        for (std::size_t b = a; b < 10; ++b) {
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += v[i * 10 + a] * v[i * 10 + b];
          worst_ortho =
              std::max(worst_ortho, std::abs(dot - (a == b ? 1.0 : 0.0)));
        }
      }
    }
  }
  report("SVD correctness: top-10 values within 1e-6 relative (20 matrices)",
         worst_rel < 1e-6, "max rel error " + fmt(worst_rel));
  report("SVD factor orthonormality within 1e-8", worst_ortho < 1e-8,
         "max deviation " + fmt(worst_ortho));
}

void criterion_learner_recovery() {
  bool sinh_ok = true, neumann_ok = true;
  double worst_sinh = 0.0, worst_neu = 0.0;
  for (std::uint64_t trial = 1; trial <= 20; ++trial) {
    std::mt19937_64 rng(trial);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> sigma(32);
    for (double& s : sigma) s = u(rng);
    std::sort(sigma.begin(), sigma.end(), std::greater<double>());

    FitTargets ts;
    ts.sigma = sigma;
    ts.source_rank = 32;
    double alpha_true = 0.7;
    for (double s : sigma) {
      ts.target.push_back(1.4 * std::sinh(alpha_true * s) *
                          (1.0 + 0.01 * noise(rng)));
    }
    double got = std::get<Sinh>(fit("sinh", ts).transform).alpha;
    double rel = std::abs(got - alpha_true) / alpha_true;
    worst_sinh = std::max(worst_sinh, rel);
    if (rel > 0.05) sinh_ok = false;

    FitTargets tn;
    tn.sigma = sigma;
    tn.source_rank = 32;
    double alpha_n = 0.8 / sigma[0];
    for (double s : sigma) {
      tn.target.push_back(1.1 * alpha_n * s / (1.0 - alpha_n * alpha_n * s * s) *
                          (1.0 + 0.01 * noise(rng)));
    }
    double got_n = std::get<OddNeumann>(fit("neumann", tn).transform).alpha;
    double rel_n = std::abs(got_n - alpha_n) / alpha_n;
    worst_neu = std::max(worst_neu, rel_n);
    if (rel_n > 0.05) neumann_ok = false;
  }
  report("learner recovery: sinh alpha within 5% under 1% noise (20 trials)",
         sinh_ok, "worst rel error " + fmt(worst_sinh));
  report("learner recovery: neumann alpha within 5% at alpha*sigma_1 = 0.8",
         neumann_ok, "worst rel error " + fmt(worst_neu));
}

void criterion_nnls() {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> su(0.3, 4.0), tu(-2.0, 2.0);
  for (int problem = 0; problem < 100 && ok; ++problem) {
    std::size_t n = 8 + rng() % 9;
    FitTargets ts;
    for (std::size_t i = 0; i < n; ++i) {
      ts.sigma.push_back(su(rng));
      ts.target.push_back(tu(rng));
    }
    std::sort(ts.sigma.begin(), ts.sigma.end(), std::greater<double>());
    ts.source_rank = n;

    FitReport r = fit("nnpoly", ts);
    const auto& c = std::get<NonnegOddPolynomial>(r.transform).coeffs;

    // design matrix columns sigma^(2j+1)
    std::size_t k = c.size();
    Eigen::MatrixXd a(n, k);
    Eigen::VectorXd b(n), x(k);
    for (std::size_t i = 0; i < n; ++i) {
      b(static_cast<Eigen::Index>(i)) = ts.target[i];
      for (std::size_t j = 0; j < k; ++j) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            std::pow(ts.sigma[i], 2.0 * static_cast<double>(j) + 1.0);
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (c[j] < 0.0) {
        ok = false;
        detail = "negative coefficient";
      }
      x(static_cast<Eigen::Index>(j)) = c[j];
    }

    Eigen::VectorXd resid = a * x - b;
    Eigen::VectorXd grad = a.transpose() * resid;
    for (std::size_t j = 0; j < k; ++j) {
      double scale = a.col(static_cast<Eigen::Index>(j)).norm() *
                         (1.0 + resid.norm()) +
                     1.0;
      double gj = grad(static_cast<Eigen::Index>(j));
      if (c[j] > 1e-10 ? std::abs(gj) > 1e-8 * scale : gj < -1e-8 * scale) {
        ok = false;
        detail = "KKT violation " + fmt(gj / scale);
      }
    }

    // never below the unconstrained oracle
    Eigen::VectorXd free = a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                               .solve(b);
    double free_res = (a * free - b).squaredNorm();
    if (r.residual < free_res - 1e-9 * (1.0 + free_res)) {
      ok = false;
      detail = "residual below the unconstrained optimum";
    }
  }
  report("NNLS validity: coefficients >= 0, KKT within 1e-8 (100 problems)",
         ok, detail);
}

void criterion_map_oracle() {
  // AP worked example: relevant at positions 1 and 3 of three -> 5/6
  std::vector<std::size_t> ranked{10, 20, 30};
  bool ap_ok = std::abs(average_precision(ranked, {10, 30}) - 5.0 / 6.0) < 1e-15;

  // hand-built 5-user instance (per-user APs: 1, 1/4, 7/10, 1/2, 1)
  std::vector<Edge> train_edges;
  for (std::uint32_t u = 0; u < 5; ++u) train_edges.push_back({u, u, std::nullopt});
  BipartiteGraph train = BipartiteGraph::from_edges(5, 6, train_edges);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> test = {
      {0, 1}, {0, 2}, {1, 3}, {2, 0}, {2, 5}, {3, 5}, {4, 0}, {4, 1}, {4, 2}};
  std::vector<std::vector<double>> rows = {{0, 6, 5, 4, 3, 2},
                                           {5, 0, 1, 2, 4, 3},
                                           {1, 1, 0, 1, 1, 1},
                                           {2, 1, 9, 0, 1, 3},
                                           {9, 8, 7, 1, 0, 2}};
  EvalConfig cfg;
  MethodEval r = evaluate_method(
      train, test, [&](std::uint32_t u) { return rows[u]; }, cfg);
  double expect = (1.0 + 0.25 + 0.7 + 0.5 + 1.0) / 5.0;
  bool map_ok = r.users_evaluated == 5 && std::abs(r.map - expect) < 1e-15;
  report("MAP oracle: AP worked example 5/6 and exact 5-user MAP",
         ap_ok && map_ok, "got MAP " + fmt(r.map) + " expected " + fmt(expect));
}

void criterion_bipartivity() {
  UnipartiteGraph k34, k6;
  k34.node_count = 7;
  for (std::uint32_t i = 0; i < 3; ++i)
    for (std::uint32_t j = 0; j < 4; ++j) k34.edges.emplace_back(i, 3 + j);
  k6.node_count = 6;
  for (std::uint32_t i = 0; i < 6; ++i)
    for (std::uint32_t j = i + 1; j < 6; ++j) k6.edges.emplace_back(i, j);

  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    BipartivityConfig cfg;
    cfg.seed = seed;
    BipartivityReport a = assess(k34, cfg);
    BipartivityReport b = assess(k6, cfg);
    if (!a.nearly_bipartite) {
      ok = false;
      detail = "K_{3,4} misclassified at seed " + std::to_string(seed) +
               " (ratio " + fmt(a.ratio) + ")";
    }
    if (b.nearly_bipartite) {
      ok = false;
      detail = "K_6 misclassified at seed " + std::to_string(seed) +
               " (ratio " + fmt(b.ratio) + ")";
    }
  }
  report("bipartivity fixtures: K_{3,4} nearly-bipartite, K_6 not (10 seeds)",
         ok, detail);
}

void criterion_cross_partition() {
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 50 && ok; ++seed) {
    BipartiteGraph g = testutil::random_bipartite(seed, 20, 20);
    for (std::size_t u = 0; u < g.left_count && ok; ++u) {
      for (std::size_t w = 0; w < g.right_count; ++w) {
        if (common_neighbors(g, u, g.left_count + w) != 0) {
          ok = false;
          break;
        }
      }
    }
  }
  report("cross-partition nullity: common neighbors = 0 across partitions", ok);
}

void criterion_movielens() {
  std::string path = std::string(ODDLINK_SOURCE_DIR) + "/data/ml-100k/u.data";
  std::ifstream probe(path);
  if (!probe) {
    report("desk-scale run on MovieLens 100k (pref MAP 0.812 +/- 0.08, "
           "poly MAP 0.822 +/- 0.08, < 5 min)",
           false, "dataset not present at data/ml-100k/u.data and this "
           "environment has no network access to fetch it",
           /*diagnostic=*/true);
    return;
  }
  try {
    auto start = std::chrono::steady_clock::now();
    ParseOptions popts;
    popts.has_weight = true;
    popts.has_timestamp = true;
    EvalConfig cfg;
    cfg.rank = 32;
    cfg.methods = {"pref", "poly"};
    cfg.threads = 4;
    EvalReport rep = run_experiment(path, popts, cfg);
    double elapsed = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    double pref = -1.0, poly = -1.0;
    for (const MethodResult& m : rep.methods) {
      if (m.method == "pref" && m.ok) pref = m.map;
      if (m.method == "poly" && m.ok) poly = m.map;
    }
    bool ok = elapsed < 300.0 && std::abs(pref - 0.812) <= 0.08 &&
              std::abs(poly - 0.822) <= 0.08;
    report("desk-scale run on MovieLens 100k (pref MAP 0.812 +/- 0.08, "
           "poly MAP 0.822 +/- 0.08, < 5 min)",
           ok,
           "pref " + fmt(pref) + ", poly " + fmt(poly) + ", " + fmt(elapsed) +
               "s",
           /*diagnostic=*/true);
  } catch (const std::exception& e) {
    report("desk-scale run on MovieLens 100k", false, e.what(),
           /*diagnostic=*/true);
  }
}

}  // namespace

int main() {
  criterion_spectral_oracle();
  criterion_block_identity();
  criterion_series_consistency();
  criterion_svd();
  criterion_learner_recovery();
  criterion_nnls();
  criterion_map_oracle();
  criterion_bipartivity();
  criterion_cross_partition();
  criterion_movielens();
  if (g_failures > 0) {
    std::cout << g_failures << " binding criterion(s) failed\n";
    return 1;
  }
  std::cout << "all binding criteria passed\n";
  return 0;
}
