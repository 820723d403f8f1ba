#include "oddlink/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "oddlink/errors.hpp"
#include "oddlink/nnls.hpp"
#include "oddlink/small_dense.hpp"

namespace oddlink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Optimal scale for fixed shape values g: beta = sum(g d) / sum(g^2),
// optionally clamped to beta >= 0. Returns {beta, residual}.
std::pair<double, double> scale_and_residual(std::span<const double> g,
                                             std::span<const double> d,
                                             bool positive_scale) {
  double gd = 0.0, gg = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    gd += g[i] * d[i];
    gg += g[i] * g[i];
  }
  double beta = gg > 0.0 ? gd / gg : 0.0;
  if (positive_scale && beta < 0.0) beta = 0.0;
  double res = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double e = beta * g[i] - d[i];
    res += e * e;
  }
  return {beta, res};
}

struct ScalarFit {
  double alpha = 0.0;
  double beta = 0.0;
  double residual = kInf;
};

// Grid search over log-spaced alpha followed by golden-section refinement
// around the best grid point. `shape` returns the unit-scale family value
// or NaN outside the valid domain.
ScalarFit fit_scalar_family(const FitTargets& targets,
                            const std::function<double(double, double)>& shape,
                            double alpha_lo, double alpha_hi,
                            const FitOptions& options) {
  const auto& sig = targets.sigma;
  const auto& d = targets.target;
  std::vector<double> g(sig.size());

  ScalarFit best;
  auto objective = [&](double alpha) {
    for (std::size_t i = 0; i < sig.size(); ++i) {
      double v = shape(alpha, sig[i]);
      if (!std::isfinite(v)) return kInf;
      g[i] = v;
    }
    auto [beta, res] = scale_and_residual(g, d, options.positive_scale);
    if (res < best.residual) best = {alpha, beta, res};
    return res;
  };

  std::size_t n = std::max<std::size_t>(options.grid, 3);
  double llo = std::log(alpha_lo), lhi = std::log(alpha_hi);
  std::size_t best_idx = 0;
  double best_grid = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    double alpha = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                      static_cast<double>(n - 1));
    double res = objective(alpha);
    if (res < best_grid) {
      best_grid = res;
      best_idx = i;
    }
  }

  // golden section in log space on the bracket around the best grid point
  double step = (lhi - llo) / static_cast<double>(n - 1);
  double a = llo + step * (best_idx == 0 ? 0.0 : static_cast<double>(best_idx - 1));
  double b = llo + step * static_cast<double>(std::min(best_idx + 1, n - 1));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = objective(std::exp(x1));
  double f2 = objective(std::exp(x2));
  while (b - a > options.golden_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = objective(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = objective(std::exp(x2));
    }
  }
  return best;
}

FitReport fit_polynomial(const FitTargets& targets, const FitOptions& options,
                         bool nonneg) {
  std::size_t n_coeffs = options.poly_degree + 1;
  if (targets.size() < n_coeffs) {
    throw std::invalid_argument("polynomial fit needs at least " +
                                std::to_string(n_coeffs) + " target pairs");
  }
  std::size_t k = targets.size();
  DenseMatrix design(k, n_coeffs);
  for (std::size_t i = 0; i < k; ++i) {
    double s = targets.sigma[i];
    double p = s;
    for (std::size_t j = 0; j < n_coeffs; ++j) {
      design.at(i, j) = p;
      p *= s * s;
    }
  }

  std::vector<double> coeffs;
  if (nonneg) {
    // equilibrate columns; scaling preserves the sign constraint
    std::vector<double> scale(n_coeffs, 1.0);
    DenseMatrix scaled = design;
    for (std::size_t j = 0; j < n_coeffs; ++j) {
      double norm = 0.0;
      for (std::size_t i = 0; i < k; ++i) norm += scaled.at(i, j) * scaled.at(i, j);
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        scale[j] = norm;
        for (std::size_t i = 0; i < k; ++i) scaled.at(i, j) /= norm;
      }
    }
    coeffs = nnls(scaled, targets.target);
    for (std::size_t j = 0; j < n_coeffs; ++j) coeffs[j] /= scale[j];
  } else {
    coeffs = solve_least_squares(design, targets.target);
  }

  double res = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double fitted = 0.0;
    for (std::size_t j = 0; j < n_coeffs; ++j) fitted += design.at(i, j) * coeffs[j];
    double e = fitted - targets.target[i];
    res += e * e;
  }

  FitReport report;
  report.family = nonneg ? "nnpoly" : "poly";
  if (nonneg) {
    report.transform = NonnegOddPolynomial{std::move(coeffs)};
  } else {
    report.transform = OddPolynomial{std::move(coeffs)};
  }
  report.residual = res;
  report.targets = targets;
  return report;
}

FitReport fit_rank_reduction(const FitTargets& targets, const FitOptions& options) {
  std::size_t k = targets.size();
  std::vector<double> g(k);
  double best_res = kInf;
  std::size_t best_keep = 1;
  double best_beta = 0.0;
  for (std::size_t keep = 1; keep <= k; ++keep) {
    double threshold = std::abs(targets.sigma[keep - 1]);
    for (std::size_t i = 0; i < k; ++i) {
      g[i] = std::abs(targets.sigma[i]) >= threshold ? targets.sigma[i] : 0.0;
    }
    auto [beta, res] = scale_and_residual(g, targets.target, options.positive_scale);
    if (res < best_res) {  // ties prefer the smaller keep
      best_res = res;
      best_keep = keep;
      best_beta = beta;
    }
  }
  FitReport report;
  report.family = "reduction";
  report.transform = RankReduction{best_keep, best_beta};
  report.residual = best_res;
  report.targets = targets;
  return report;
}

}  // namespace

FitTargets build_targets(const SvdModel& train_model,
                         const SparseMatrix& holdout) {
  if (holdout.rows() != train_model.rows || holdout.cols() != train_model.cols) {
    throw std::invalid_argument("build_targets: holdout dimensions mismatch");
  }
  FitTargets t;
  t.source_rank = train_model.rank;
  t.sigma = train_model.singular_values;
  t.target.resize(train_model.rank);
  std::vector<double> v(train_model.cols);
  for (std::size_t i = 0; i < train_model.rank; ++i) {
    for (std::size_t r = 0; r < train_model.cols; ++r) v[r] = train_model.right(r, i);
    std::vector<double> bv = holdout.multiply(v);
    double proj = 0.0;
    for (std::size_t r = 0; r < train_model.rows; ++r) {
      proj += train_model.left(r, i) * bv[r];
    }
    t.target[i] = train_model.singular_values[i] + proj;
  }
  return t;
}

FitReport fit(const std::string& family, const FitTargets& targets,
              const FitOptions& options) {
  if (targets.sigma.size() != targets.target.size()) {
    throw std::invalid_argument("fit: sigma/target length mismatch");
  }
  double s1 = max_abs(targets.sigma);
  if (s1 == 0.0) {
    throw NumericalError("fit: degenerate all-zero spectrum");
  }

  if (family == "poly") return fit_polynomial(targets, options, false);
  if (family == "nnpoly") return fit_polynomial(targets, options, true);

  if (targets.size() < 2) {
    throw std::invalid_argument("fit: two-parameter families need >= 2 pairs");
  }
  if (family == "reduction") return fit_rank_reduction(targets, options);

  double lo = options.alpha_min;
  double hi = options.alpha_max;
  ScalarFit sf;
  FitReport report;
  report.targets = targets;
  report.family = family;

  if (family == "sinh" || family == "exp") {
    if (lo <= 0.0) lo = 1e-6 / s1;
    if (hi <= 0.0) hi = 700.0 / s1;  // double exp overflow guard
    auto shape = family == "sinh"
                     ? std::function<double(double, double)>(
                           [](double a, double s) { return std::sinh(a * s); })
                     : std::function<double(double, double)>(
                           [](double a, double s) { return std::exp(a * s); });
    sf = fit_scalar_family(targets, shape, lo, hi, options);
    if (family == "sinh") {
      report.transform = Sinh{sf.alpha, sf.beta};
    } else {
      report.transform = Exp{sf.alpha, sf.beta};
    }
  } else if (family == "neumann") {
    if (lo <= 0.0) lo = 1e-6 / s1;
    if (hi <= 0.0) hi = (1.0 - 1e-3) / s1;  // pole avoidance
    auto shape = [](double a, double s) {
      double x = a * s;
      if (std::abs(x) >= 1.0) return std::numeric_limits<double>::quiet_NaN();
      return x / (1.0 - x * x);
    };
    sf = fit_scalar_family(targets, shape, lo, hi, options);
    report.transform = OddNeumann{sf.alpha, sf.beta};
  } else {
    throw std::invalid_argument("fit: unknown family '" + family + "'");
  }
  report.residual = sf.residual;
  return report;
}

std::vector<FitOutcome> fit_all(const std::vector<std::string>& families,
                                const FitTargets& targets,
                                const FitOptions& options) {
  std::vector<FitOutcome> fitted, skipped;
  for (const std::string& family : families) {
    FitOutcome outcome;
    outcome.family = family;
    try {
      outcome.report = fit(family, targets, options);
      fitted.push_back(std::move(outcome));
    } catch (const std::exception& e) {
      outcome.error = e.what();
      skipped.push_back(std::move(outcome));
    }
  }
  std::sort(fitted.begin(), fitted.end(), [](const FitOutcome& a, const FitOutcome& b) {
    if (a.report->residual != b.report->residual) {
      return a.report->residual < b.report->residual;
    }
    return a.family < b.family;
  });
  std::sort(skipped.begin(), skipped.end(),
            [](const FitOutcome& a, const FitOutcome& b) { return a.family < b.family; });
  fitted.insert(fitted.end(), std::make_move_iterator(skipped.begin()),
                std::make_move_iterator(skipped.end()));
  return fitted;
}

double recompute_residual(const FitReport& report) {
  double res = 0.0;
  std::span<const double> context(report.targets.sigma);
  for (std::size_t i = 0; i < report.targets.size(); ++i) {
    double e = eval_transform(report.transform, report.targets.sigma[i], context) -
               report.targets.target[i];
    res += e * e;
  }
  return res;
}

void write_curve_csv(std::ostream& out, const FitReport& report) {
  out << "sigma,target,fitted\n";
  char buf[128];
  std::span<const double> context(report.targets.sigma);
  for (std::size_t i = 0; i < report.targets.size(); ++i) {
    double fitted = eval_transform(report.transform, report.targets.sigma[i], context);
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", report.targets.sigma[i],
                  report.targets.target[i], fitted);
    out << buf;
  }
}

}  // namespace oddlink
