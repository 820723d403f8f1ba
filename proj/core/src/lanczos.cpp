#include "oddlink/svd.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "oddlink/errors.hpp"
#include "oddlink/small_dense.hpp"

namespace oddlink {

namespace {

using Vec = std::vector<double>;

double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void scale(Vec& v, double a) {
  for (double& x : v) x *= a;
}

// w -= dot(w, basis[j]) * basis[j] for all j; two classical passes.
void reorthogonalize(Vec& w, const std::vector<Vec>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vec& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) dot += w[i] * b[i];
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= dot * b[i];
    }
  }
}

Vec random_unit(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (double& x : v) x = dist(rng);
  double nn = norm2(v);
  if (nn > 0.0) scale(v, 1.0 / nn);
  return v;
}

// Fresh random vector orthogonal to the basis; empty when the space is
// exhausted.
Vec restart_vector(std::size_t n, const std::vector<Vec>& basis,
                   std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    Vec v = random_unit(n, rng);
    reorthogonalize(v, basis);
    double nn = norm2(v);
    if (nn > 1e-8) {
      scale(v, 1.0 / nn);
      return v;
    }
  }
  return {};
}

}  // namespace

SvdModel truncated_svd(const SparseMatrix& m, const SvdOptions& options) {
  std::size_t n = m.rows(), p = m.cols();
  std::size_t kmax = std::min(n, p);
  std::size_t k = options.rank;
  if (k < 1 || k > kmax) {
    throw std::invalid_argument("truncated_svd: rank must be in [1, min(rows, cols)]");
  }
  std::mt19937_64 rng(options.seed);
  std::vector<Vec> ubasis, vbasis;
  std::vector<double> alphas, betas;  // betas[j] couples v_{j+1} to u_j
  vbasis.push_back(random_unit(p, rng));

  double coeff_scale = 0.0;
  double brk = 0.0;
  // When the u side of the Krylov space fills up while an unconsumed v_j
  // remains, A v_j lies in span(U) and the exact projected factor is the
  // rectangular j x (j+1) bidiagonal including the trailing beta column.
  bool u_trailing = false;

  DenseMatrix pmat, qmat;
  std::vector<double> svals;

  auto build_projected = [&]() {
    std::size_t ju = alphas.size();
    std::size_t jv = u_trailing ? ju + 1 : ju;
    DenseMatrix b(ju, jv);
    for (std::size_t i = 0; i < ju; ++i) {
      b.at(i, i) = alphas[i];
      if (i < betas.size() && i + 1 < jv) b.at(i, i + 1) = betas[i];
    }
    jacobi_svd(b, pmat, svals, qmat);
  };

  // Residual bound for Ritz triplet i after a completed v-step:
  // beta_j |P(j-1, i)|.
  auto ritz_converged = [&]() {
    std::size_t j = alphas.size();
    if (j < k) return false;
    build_projected();
    double s1 = svals.empty() ? 0.0 : svals[0];
    if (s1 == 0.0) return true;  // zero matrix
    double last_beta = betas[j - 1];
    for (std::size_t i = 0; i < k; ++i) {
      if (last_beta * std::abs(pmat.at(j - 1, i)) > options.tol * s1) return false;
    }
    return true;
  };

  while (alphas.size() < options.max_iter) {
    std::size_t j = alphas.size();  // building step j (0-based)
    // u_j from A v_j
    Vec u = m.multiply(vbasis[j]);
    reorthogonalize(u, ubasis);
    double alpha = norm2(u);
    coeff_scale = std::max(coeff_scale, alpha);
    brk = 1e-10 * std::max(coeff_scale, 1e-30);
    if (alpha <= brk) {
      alpha = 0.0;
      u = ubasis.size() < n ? restart_vector(n, ubasis, rng) : Vec{};
      if (u.empty()) {
        u_trailing = true;  // A v_j already lies in span(U); B is exact
        break;
      }
      // restart: a fresh direction decouples exactly (alpha_j = 0)
    } else {
      scale(u, 1.0 / alpha);
    }
    ubasis.push_back(std::move(u));
    alphas.push_back(alpha);

    // v_{j+1} from A^T u_j
    Vec v = m.multiply_transpose(ubasis[j]);
    reorthogonalize(v, vbasis);
    double beta = norm2(v);
    coeff_scale = std::max(coeff_scale, beta);
    brk = 1e-10 * std::max(coeff_scale, 1e-30);
    bool v_added = false;
    if (beta <= brk) {
      beta = 0.0;
      if (vbasis.size() < p) {
        v = restart_vector(p, vbasis, rng);
        if (!v.empty()) {
          vbasis.push_back(std::move(v));
          v_added = true;
        }
      }
    } else {
      scale(v, 1.0 / beta);
      vbasis.push_back(std::move(v));
      v_added = true;
    }
    betas.push_back(beta);

    if (!v_added) break;  // beta_j = 0: the square factor is exact

    std::size_t steps = alphas.size();
    if (steps >= k && (steps % 8 == 0 || steps >= kmax)) {
      if (ritz_converged()) break;
    }
  }

  std::size_t j = alphas.size();
  if (j < k) {
    throw NumericalError("truncated_svd: Krylov space exhausted before rank " +
                         std::to_string(k));
  }
  build_projected();

  SvdModel model;
  model.rows = n;
  model.cols = p;
  model.rank = k;
  model.seed = options.seed;
  model.singular_values.assign(svals.begin(), svals.begin() + static_cast<std::ptrdiff_t>(k));
  model.left_vectors.assign(n * k, 0.0);
  model.right_vectors.assign(p * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t t = 0; t < pmat.rows; ++t) {
      double pw = pmat.at(t, i);
      if (pw != 0.0) {
        const Vec& ub = ubasis[t];
        for (std::size_t r = 0; r < n; ++r) model.left_vectors[r * k + i] += pw * ub[r];
      }
    }
    for (std::size_t t = 0; t < qmat.rows; ++t) {
      double qw = qmat.at(t, i);
      if (qw != 0.0) {
        const Vec& vb = vbasis[t];
        for (std::size_t r = 0; r < p; ++r) model.right_vectors[r * k + i] += qw * vb[r];
      }
    }
  }

  // exact residual check on the returned triplets
  double s1 = model.singular_values.empty() ? 0.0 : model.singular_values[0];
  double worst = 0.0;
  if (s1 > 0.0) {
    Vec uv(n), vv(p);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t r = 0; r < n; ++r) uv[r] = model.left(r, i);
      for (std::size_t r = 0; r < p; ++r) vv[r] = model.right(r, i);
      Vec bv = m.multiply(vv);
      Vec btu = m.multiply_transpose(uv);
      double s = model.singular_values[i];
      double r1 = 0.0, r2 = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        double d = bv[r] - s * uv[r];
        r1 += d * d;
      }
      for (std::size_t r = 0; r < p; ++r) {
        double d = btu[r] - s * vv[r];
        r2 += d * d;
      }
      worst = std::max({worst, std::sqrt(r1), std::sqrt(r2)});
    }
    if (worst > options.tol * s1) {
      std::ostringstream msg;
      msg << "truncated_svd: not converged after " << j
          << " steps, worst residual " << worst << " (tol "
          << options.tol * s1 << ")";
      throw NumericalError(msg.str());
    }
  }

  // stabilize downstream odd-function fits
  for (double& s : model.singular_values) {
    if (s < 1e-10 * s1) s = 0.0;
  }
  return model;
}

EigenModel extremal_eigs(const SparseMatrix& m, const EigenOptions& options) {
  std::size_t n = m.rows();
  if (!m.is_symmetric()) {
    throw std::invalid_argument("extremal_eigs: matrix is not symmetric");
  }
  std::size_t want = options.top + options.bottom;
  if (want < 1 || want > n) {
    throw std::invalid_argument("extremal_eigs: top + bottom must be in [1, n]");
  }

  std::mt19937_64 rng(options.seed);
  std::vector<Vec> basis;
  std::vector<double> alphas, betas;
  basis.push_back(random_unit(n, rng));

  double coeff_scale = 0.0;
  bool exhausted = false;
  std::size_t m_cap = std::min(n, options.max_iter);

  DenseMatrix ritz_vecs;
  std::vector<double> ritz_vals;

  auto build_projected = [&]() {
    std::size_t j = alphas.size();
    DenseMatrix t(j, j);
    for (std::size_t i = 0; i < j; ++i) {
      t.at(i, i) = alphas[i];
      if (i + 1 < j) {
        t.at(i, i + 1) = betas[i];
        t.at(i + 1, i) = betas[i];
      }
    }
    jacobi_eigh(t, ritz_vals, ritz_vecs);  // sorted descending
  };

  auto converged_now = [&]() {
    std::size_t j = alphas.size();
    if (j < want) return false;
    build_projected();
    double scale_abs = 0.0;
    for (double v : ritz_vals) scale_abs = std::max(scale_abs, std::abs(v));
    if (scale_abs == 0.0) return true;
    double last_beta = betas.size() == j ? betas[j - 1] : 0.0;
    auto ok = [&](std::size_t col) {
      return last_beta * std::abs(ritz_vecs.at(j - 1, col)) <=
             options.tol * scale_abs;
    };
    for (std::size_t i = 0; i < options.top; ++i) {
      if (!ok(i)) return false;
    }
    for (std::size_t i = 0; i < options.bottom; ++i) {
      if (!ok(j - 1 - i)) return false;
    }
    return true;
  };

  while (alphas.size() < m_cap && !exhausted) {
    std::size_t j = alphas.size();
    Vec w = m.multiply(basis[j]);
    double alpha = 0.0;
    for (std::size_t i = 0; i < n; ++i) alpha += w[i] * basis[j][i];
    reorthogonalize(w, basis);
    alphas.push_back(alpha);
    coeff_scale = std::max({coeff_scale, std::abs(alpha)});
    double beta = norm2(w);
    coeff_scale = std::max(coeff_scale, beta);
    double brk = 1e-10 * std::max(coeff_scale, 1e-30);

    if (alphas.size() == m_cap) break;  // full space; residuals verified below

    if (beta <= brk) {
      beta = 0.0;
      w = restart_vector(n, basis, rng);
      if (w.empty()) {
        exhausted = true;
        betas.push_back(0.0);
        break;
      }
    } else {
      scale(w, 1.0 / beta);
    }
    basis.push_back(std::move(w));
    betas.push_back(beta);

    std::size_t steps = alphas.size();
    if (steps >= want && (beta == 0.0 || steps % 8 == 0 || steps >= n)) {
      if (converged_now()) break;
    }
  }

  std::size_t j = alphas.size();
  if (j < want) {
    throw NumericalError("extremal_eigs: Krylov space exhausted with only " +
                         std::to_string(j) + " directions");
  }
  build_projected();

  // select both spectrum ends from the descending list
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < options.top; ++i) picks.push_back(i);
  for (std::size_t i = 0; i < options.bottom; ++i) picks.push_back(j - 1 - i);
  std::sort(picks.begin(), picks.end());
  picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  std::sort(picks.begin(), picks.end(), [&](std::size_t a, std::size_t b) {
    double aa = std::abs(ritz_vals[a]), ab = std::abs(ritz_vals[b]);
    if (aa != ab) return aa > ab;
    return ritz_vals[a] > ritz_vals[b];
  });

  std::size_t out = picks.size();
  EigenModel model;
  model.n = n;
  model.eigenvalues.reserve(out);
  model.vectors.assign(n * out, 0.0);
  for (std::size_t c = 0; c < out; ++c) {
    std::size_t col = picks[c];
    model.eigenvalues.push_back(ritz_vals[col]);
    for (std::size_t t = 0; t < j; ++t) {
      double w = ritz_vecs.at(t, col);
      if (w == 0.0) continue;
      const Vec& b = basis[t];
      for (std::size_t r = 0; r < n; ++r) model.vectors[r * out + c] += w * b[r];
    }
  }

  double scale_abs = 0.0;
  for (double v : model.eigenvalues) scale_abs = std::max(scale_abs, std::abs(v));
  if (scale_abs > 0.0) {
    Vec x(n);
    double worst = 0.0;
    for (std::size_t c = 0; c < out; ++c) {
      for (std::size_t r = 0; r < n; ++r) x[r] = model.vectors[r * out + c];
      Vec ax = m.multiply(x);
      double rnorm = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        double d = ax[r] - model.eigenvalues[c] * x[r];
        rnorm += d * d;
      }
      worst = std::max(worst, std::sqrt(rnorm));
    }
    if (worst > options.tol * scale_abs) {
      std::ostringstream msg;
      msg << "extremal_eigs: not converged after " << j
          << " steps, worst residual " << worst;
      throw NumericalError(msg.str());
    }
  }
  return model;
}

}  // namespace oddlink
