#pragma once

#include <cstdint>
#include <iosfwd>

#include "oddlink/fitting.hpp"
#include "oddlink/graph.hpp"

namespace oddlink {

struct BipartivityConfig {
  std::size_t m_top = 16;
  std::size_t m_bottom = 16;
  double holdout_fraction = 0.30;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  std::size_t max_iter = 1000;
};

struct BipartivityReport {
  FitReport sinh_fit;
  FitReport exp_fit;
  double ratio = 0.0;  // residual(sinh) / residual(exp)
  bool nearly_bipartite = false;
  std::vector<double> eigenvalues;  // extremal spectrum used for the fit
};

/// Fits sinh vs exp to the curve (training eigenvalue, observed spectral
/// target) and declares near-bipartivity when the odd fit wins. Both
/// scale parameters are constrained nonnegative.
BipartivityReport assess(const UnipartiteGraph& g,
                         const BipartivityConfig& config = {});

/// CSV of (lambda, target, sinh_fit, exp_fit) rows for curve plots.
void write_bipartivity_csv(std::ostream& out, const BipartivityReport& report);

}  // namespace oddlink
