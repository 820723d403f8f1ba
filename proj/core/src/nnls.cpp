#include "oddlink/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oddlink/errors.hpp"

namespace oddlink {

// Lawson-Hanson active set iteration. The least squares subproblems on
// the passive set reuse the QR-based dense solver; problems here are tiny
// (a handful of polynomial coefficients).
std::vector<double> nnls(const DenseMatrix& a, std::span<const double> b,
                         std::size_t max_iter) {
  std::size_t m = a.rows, n = a.cols;
  if (b.size() != m) throw std::invalid_argument("nnls: dimension mismatch");
  if (max_iter == 0) max_iter = 3 * n + 30;

  std::vector<double> x(n, 0.0);
  std::vector<bool> passive(n, false);

  auto residual = [&](const std::vector<double>& sol) {
    std::vector<double> r(m);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = b[i];
      for (std::size_t j = 0; j < n; ++j) acc -= a.at(i, j) * sol[j];
      r[i] = acc;
    }
    return r;
  };

  auto gradient = [&](const std::vector<double>& r) {
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += a.at(i, j) * r[i];
      g[j] = acc;  // -grad/2 of the objective; positive means "add me"
    }
    return g;
  };

  // scale-aware tolerance on the dual
  double amax = 0.0;
  for (double v : a.data) amax = std::max(amax, std::abs(v));
  double bmax = 0.0;
  for (double v : b) bmax = std::max(bmax, std::abs(v));
  const double dual_tol = 1e-12 * std::max(amax * bmax * m, 1e-300);

  auto solve_passive = [&]() {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j) {
      if (passive[j]) cols.push_back(j);
    }
    std::vector<double> z(n, 0.0);
    if (cols.empty()) return z;
    DenseMatrix sub(m, cols.size());
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t c = 0; c < cols.size(); ++c) sub.at(i, c) = a.at(i, cols[c]);
    std::vector<double> zc = solve_least_squares(sub, b);
    for (std::size_t c = 0; c < cols.size(); ++c) z[cols[c]] = zc[c];
    return z;
  };

  for (std::size_t outer = 0; outer < max_iter; ++outer) {
    std::vector<double> r = residual(x);
    std::vector<double> g = gradient(r);

    // most violated KKT condition among active variables
    std::ptrdiff_t enter = -1;
    double best = dual_tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (!passive[j] && g[j] > best) {
        best = g[j];
        enter = static_cast<std::ptrdiff_t>(j);
      }
    }
    if (enter < 0) return x;  // KKT satisfied
    passive[static_cast<std::size_t>(enter)] = true;

    std::vector<double> z = solve_passive();
    std::size_t inner_guard = 0;
    while (true) {
      bool feasible = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0) {
          feasible = false;
          break;
        }
      }
      if (feasible) break;
      if (++inner_guard > n + 2) {
        throw NumericalError("nnls: inner loop failed to restore feasibility");
      }
      double step = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0 && x[j] != z[j]) {
          step = std::min(step, x[j] / (x[j] - z[j]));
        }
      }
      if (!std::isfinite(step)) {
        throw NumericalError("nnls: degenerate step");
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (passive[j]) x[j] += step * (z[j] - x[j]);
        if (passive[j] && x[j] <= 1e-14 * std::max(1.0, std::abs(z[j]))) {
          x[j] = 0.0;
          passive[j] = false;
        }
      }
      z = solve_passive();
    }
    x = z;
  }
  throw NumericalError("nnls: iteration limit reached");
}

}  // namespace oddlink
