#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oddlink/sparse.hpp"
#include "oddlink/svd.hpp"
#include "oddlink/transforms.hpp"

namespace oddlink {

/// One-dimensional curve fitting targets: observed values d_i paired with
/// the training spectrum sigma_i (nonincreasing).
struct FitTargets {
  std::vector<double> sigma;
  std::vector<double> target;
  std::size_t source_rank = 0;

  std::size_t size() const { return sigma.size(); }
};

struct FitOptions {
  std::size_t grid = 200;          // log-spaced alpha candidates
  double alpha_min = 0.0;          // 0 = automatic from the spectrum
  double alpha_max = 0.0;
  double golden_tol = 1e-6;        // relative width of the refinement
  unsigned poly_degree = 3;        // J: powers 1, 3, ..., 2J+1
  bool positive_scale = false;     // constrain beta >= 0 (bipartivity)
};

struct FitReport {
  SpectralTransform transform;
  double residual = 0.0;  // sum of squared errors
  FitTargets targets;
  std::string family;
};

/// d_i = sigma_i + u_i^T B_holdout v_i, one pair per retained triplet.
FitTargets build_targets(const SvdModel& train_model,
                         const SparseMatrix& holdout);

/// Least-squares fit of one family ("sinh", "neumann", "reduction",
/// "poly", "nnpoly", "exp") to the targets.
FitReport fit(const std::string& family, const FitTargets& targets,
              const FitOptions& options = {});

struct FitOutcome {
  std::string family;
  std::optional<FitReport> report;
  std::string error;  // nonempty when the family was skipped
};

/// Fits every family; successful reports sorted by residual (ties by
/// family name), skipped families appended with their reason.
std::vector<FitOutcome> fit_all(const std::vector<std::string>& families,
                                const FitTargets& targets,
                                const FitOptions& options = {});

/// Recomputes sum_i (f(sigma_i) - d_i)^2 from the report fields.
double recompute_residual(const FitReport& report);

/// CSV of (sigma, target, fitted) triples for curve plots.
void write_curve_csv(std::ostream& out, const FitReport& report);

}  // namespace oddlink
