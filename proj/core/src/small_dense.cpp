#include "oddlink/small_dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "oddlink/errors.hpp"

namespace oddlink {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

void jacobi_eigh(const DenseMatrix& a_in, std::vector<double>& values,
                 DenseMatrix& vectors) {
  if (a_in.rows != a_in.cols) {
    throw std::invalid_argument("jacobi_eigh: matrix not square");
  }
  std::size_t n = a_in.rows;
  DenseMatrix a = a_in;
  vectors = DenseMatrix::identity(n);

  double frob = 0.0;
  for (double x : a.data) frob += x * x;
  frob = std::sqrt(frob);
  const double stop = 1e-15 * std::max(frob, 1e-300);

  const std::size_t max_sweeps = 100;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
    if (std::sqrt(2.0 * off) <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a.at(p, q);
        if (std::abs(apq) <= stop / (n * n + 1.0)) continue;
        double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = vectors.at(k, p), vkq = vectors.at(k, q);
          vectors.at(k, p) = c * vkp - s * vkq;
          vectors.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  values.resize(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a.at(i, i);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&values](std::size_t x, std::size_t y) { return values[x] > values[y]; });
  std::vector<double> sorted_values(n);
  DenseMatrix sorted_vectors(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    sorted_values[j] = values[order[j]];
    for (std::size_t i = 0; i < n; ++i)
      sorted_vectors.at(i, j) = vectors.at(i, order[j]);
  }
  values = std::move(sorted_values);
  vectors = std::move(sorted_vectors);
}

namespace {

// Orthonormalize `col` of u against columns [0, upto) and normalize;
// returns false if it vanished.
bool gram_schmidt_column(DenseMatrix& u, std::size_t col, std::size_t upto) {
  std::size_t m = u.rows;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < upto; ++j) {
      if (j == col) continue;
      double dot = 0.0;
      for (std::size_t i = 0; i < m; ++i) dot += u.at(i, j) * u.at(i, col);
      for (std::size_t i = 0; i < m; ++i) u.at(i, col) -= dot * u.at(i, j);
    }
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < m; ++i) norm += u.at(i, col) * u.at(i, col);
  norm = std::sqrt(norm);
  if (norm < 1e-12) return false;
  for (std::size_t i = 0; i < m; ++i) u.at(i, col) /= norm;
  return true;
}

}  // namespace

void jacobi_svd(const DenseMatrix& a, DenseMatrix& u, std::vector<double>& s,
                DenseMatrix& v) {
  if (a.rows < a.cols) {
    // work on the transpose and swap factors
    DenseMatrix at(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t j = 0; j < a.cols; ++j) at.at(j, i) = a.at(i, j);
    jacobi_svd(at, v, s, u);
    return;
  }

  std::size_t m = a.rows, n = a.cols;
  DenseMatrix w = a;
  v = DenseMatrix::identity(n);

  const std::size_t max_sweeps = 60;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          double wi = w.at(k, i), wj = w.at(k, j);
          alpha += wi * wi;
          beta += wj * wj;
          gamma += wi * wj;
        }
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || gamma == 0.0) {
          continue;
        }
        rotated = true;
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double sn = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          double wi = w.at(k, i), wj = w.at(k, j);
          w.at(k, i) = c * wi - sn * wj;
          w.at(k, j) = sn * wi + c * wj;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vi = v.at(k, i), vj = v.at(k, j);
          v.at(k, i) = c * vi - sn * vj;
          v.at(k, j) = sn * vi + c * vj;
        }
      }
    }
    if (!rotated) break;
  }

  s.resize(n);
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) {
    double norm = 0.0;
    for (std::size_t k = 0; k < m; ++k) norm += w.at(k, j) * w.at(k, j);
    s[j] = std::sqrt(norm);
    order[j] = j;
  }
  std::sort(order.begin(), order.end(),
            [&s](std::size_t x, std::size_t y) { return s[x] > s[y]; });

  DenseMatrix u_sorted(m, n), v_sorted(n, n);
  std::vector<double> s_sorted(n);
  double smax = n > 0 ? s[order[0]] : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t src = order[j];
    s_sorted[j] = s[src];
    for (std::size_t k = 0; k < n; ++k) v_sorted.at(k, j) = v.at(k, src);
    if (s[src] > smax * 1e-14 && s[src] > 0.0) {
      for (std::size_t k = 0; k < m; ++k)
        u_sorted.at(k, j) = w.at(k, src) / s[src];
    }
  }
  // complete U columns for null singular values
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t src = order[j];
    if (s[src] > smax * 1e-14 && s[src] > 0.0) continue;
    bool done = false;
    for (std::size_t cand = 0; cand < m && !done; ++cand) {
      for (std::size_t k = 0; k < m; ++k) u_sorted.at(k, j) = (k == cand) ? 1.0 : 0.0;
      done = gram_schmidt_column(u_sorted, j, j);
      // also orthogonalize against the later nonzero columns
      if (done) {
        for (std::size_t jj = j + 1; jj < n && done; ++jj) {
          double dot = 0.0;
          for (std::size_t k = 0; k < m; ++k) dot += u_sorted.at(k, jj) * u_sorted.at(k, j);
          if (std::abs(dot) > 1e-8) {
            for (std::size_t k = 0; k < m; ++k) u_sorted.at(k, j) -= dot * u_sorted.at(k, jj);
            done = gram_schmidt_column(u_sorted, j, j);
          }
        }
      }
    }
    if (!done) throw NumericalError("jacobi_svd: failed to complete basis");
  }

  u = std::move(u_sorted);
  s = std::move(s_sorted);
  v = std::move(v_sorted);
}

std::vector<double> solve_least_squares(const DenseMatrix& a,
                                        std::span<const double> b) {
  if (a.rows != b.size()) {
    throw std::invalid_argument("least squares: dimension mismatch");
  }
  std::size_t m = a.rows, n = a.cols;
  if (m < n) throw std::invalid_argument("least squares: underdetermined system");

  // column equilibration
  std::vector<double> scale(n, 1.0);
  DenseMatrix r = a;
  for (std::size_t j = 0; j < n; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += r.at(i, j) * r.at(i, j);
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      scale[j] = norm;
      for (std::size_t i = 0; i < m; ++i) r.at(i, j) /= norm;
    }
  }

  std::vector<double> rhs(b.begin(), b.end());

  // Householder QR applied in place
  for (std::size_t j = 0; j < n; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < m; ++i) norm += r.at(i, j) * r.at(i, j);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    double alpha = r.at(j, j) >= 0.0 ? -norm : norm;
    std::vector<double> hv(m - j, 0.0);
    hv[0] = r.at(j, j) - alpha;
    for (std::size_t i = j + 1; i < m; ++i) hv[i - j] = r.at(i, j);
    double hnorm2 = 0.0;
    for (double x : hv) hnorm2 += x * x;
    if (hnorm2 == 0.0) continue;
    for (std::size_t k = j; k < n; ++k) {
      double dot = 0.0;
      for (std::size_t i = j; i < m; ++i) dot += hv[i - j] * r.at(i, k);
      double f = 2.0 * dot / hnorm2;
      for (std::size_t i = j; i < m; ++i) r.at(i, k) -= f * hv[i - j];
    }
    double dot = 0.0;
    for (std::size_t i = j; i < m; ++i) dot += hv[i - j] * rhs[i];
    double f = 2.0 * dot / hnorm2;
    for (std::size_t i = j; i < m; ++i) rhs[i] -= f * hv[i - j];
  }

  double rmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) rmax = std::max(rmax, std::abs(r.at(j, j)));
  std::vector<double> c(n, 0.0);
  for (std::size_t jj = n; jj-- > 0;) {
    double diag = r.at(jj, jj);
    if (std::abs(diag) <= 1e-13 * std::max(rmax, 1e-300)) {
      c[jj] = 0.0;  // rank-deficient direction
      continue;
    }
    double acc = rhs[jj];
    for (std::size_t k = jj + 1; k < n; ++k) acc -= r.at(jj, k) * c[k];
    c[jj] = acc / diag;
  }
  for (std::size_t j = 0; j < n; ++j) c[j] /= scale[j];
  return c;
}

}  // namespace oddlink
