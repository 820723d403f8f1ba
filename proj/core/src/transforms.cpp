#include "oddlink/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oddlink/errors.hpp"

namespace oddlink {

namespace {

constexpr double kExpOverflow = 700.0;  // exp(709) is the double limit

double eval_odd_poly(std::span<const double> coeffs, double sigma) {
  // Horner in sigma^2, multiplied by sigma
  double s2 = sigma * sigma;
  double acc = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * s2 + coeffs[j];
  return acc * sigma;
}

}  // namespace

std::string family_name(const SpectralTransform& t) {
  struct Visitor {
    std::string operator()(const Sinh&) const { return "sinh"; }
    std::string operator()(const OddNeumann&) const { return "neumann"; }
    std::string operator()(const RankReduction&) const { return "reduction"; }
    std::string operator()(const OddPolynomial&) const { return "poly"; }
    std::string operator()(const NonnegOddPolynomial&) const { return "nnpoly"; }
    std::string operator()(const Exp&) const { return "exp"; }
  };
  return std::visit(Visitor{}, t);
}

bool is_odd_family(const SpectralTransform& t) {
  return !std::holds_alternative<Exp>(t);
}

double eval_transform(const SpectralTransform& t, double sigma,
                      std::span<const double> context) {
  struct Visitor {
    double sigma;
    std::span<const double> context;

    double operator()(const Sinh& f) const {
      double x = f.alpha * sigma;
      if (std::abs(x) > kExpOverflow) {
        throw NumericalError("sinh transform overflow: |alpha*sigma| > 700");
      }
      return f.beta * std::sinh(x);
    }
    double operator()(const OddNeumann& f) const {
      double x = f.alpha * sigma;
      if (std::abs(x) >= 1.0) {
        throw NumericalError(
            "odd von Neumann pole: |alpha*sigma| must be < 1");
      }
      return f.beta * x / (1.0 - x * x);
    }
    double operator()(const RankReduction& f) const {
      if (context.empty()) {
        throw std::invalid_argument(
            "rank reduction needs the model spectrum as context");
      }
      std::size_t k = std::min(f.keep, context.size());
      if (k == 0) return 0.0;
      // ties at the threshold are all retained; the relative slack keeps
      // repeated singular values on the same side of the cut when the
      // spectrum and the query come from different solvers
      double threshold = std::abs(context[k - 1]) * (1.0 - 1e-9);
      return std::abs(sigma) >= threshold ? f.beta * sigma : 0.0;
    }
    double operator()(const OddPolynomial& f) const {
      return eval_odd_poly(f.coeffs, sigma);
    }
    double operator()(const NonnegOddPolynomial& f) const {
      return eval_odd_poly(f.coeffs, sigma);
    }
    double operator()(const Exp& f) const {
      double x = f.alpha * sigma;
      if (std::abs(x) > kExpOverflow) {
        throw NumericalError("exp transform overflow: |alpha*sigma| > 700");
      }
      return f.beta * std::exp(x);
    }
  };
  return std::visit(Visitor{sigma, context}, t);
}

std::vector<double> transform_values(const SvdModel& model,
                                     const SpectralTransform& t) {
  std::vector<double> out(model.rank);
  std::span<const double> context(model.singular_values);
  for (std::size_t i = 0; i < model.rank; ++i) {
    out[i] = eval_transform(t, model.singular_values[i], context);
  }
  return out;
}

double score(const SvdModel& model, const SpectralTransform& t, std::size_t u,
             std::size_t w) {
  if (!is_odd_family(t)) {
    throw std::invalid_argument("exp is not a valid bipartite predictor");
  }
  if (u >= model.rows || w >= model.cols) {
    throw std::out_of_range("score: node index out of range");
  }
  std::vector<double> f = transform_values(model, t);
  double acc = 0.0;
  for (std::size_t i = 0; i < model.rank; ++i) {
    acc += f[i] * model.left(u, i) * model.right(w, i);
  }
  return acc;
}

std::vector<double> score_row(const SvdModel& model, const SpectralTransform& t,
                              std::size_t u) {
  if (!is_odd_family(t)) {
    throw std::invalid_argument("exp is not a valid bipartite predictor");
  }
  if (u >= model.rows) throw std::out_of_range("score_row: index out of range");
  std::vector<double> f = transform_values(model, t);
  std::vector<double> weighted(model.rank);
  for (std::size_t i = 0; i < model.rank; ++i) weighted[i] = f[i] * model.left(u, i);
  std::vector<double> out(model.cols, 0.0);
  for (std::size_t w = 0; w < model.cols; ++w) {
    double acc = 0.0;
    const double* row = &model.right_vectors[w * model.rank];
    for (std::size_t i = 0; i < model.rank; ++i) acc += weighted[i] * row[i];
    out[w] = acc;
  }
  return out;
}

std::vector<std::pair<std::size_t, double>> top_n(
    const SvdModel& model, const SpectralTransform& t, std::size_t u,
    std::size_t n, const std::vector<bool>& exclude) {
  if (n < 1) throw std::invalid_argument("top_n: n must be >= 1");
  std::vector<double> scores = score_row(model, t, u);
  std::vector<std::pair<std::size_t, double>> candidates;
  candidates.reserve(model.cols);
  for (std::size_t w = 0; w < model.cols; ++w) {
    if (w < exclude.size() && exclude[w]) continue;
    candidates.emplace_back(w, scores[w]);
  }
  auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  if (candidates.size() > n) {
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n),
                      candidates.end(), better);
    candidates.resize(n);
  } else {
    std::sort(candidates.begin(), candidates.end(), better);
  }
  return candidates;
}

double preferential_attachment(const BipartiteGraph& g, std::size_t u,
                               std::size_t w) {
  if (g.edge_count() == 0) {
    throw std::invalid_argument("preferential attachment undefined for |E|=0");
  }
  if (u >= g.left_count || w >= g.right_count) {
    throw std::out_of_range("preferential attachment: index out of range");
  }
  return static_cast<double>(g.left_degrees[u]) *
         static_cast<double>(g.right_degrees[w]) /
         (2.0 * static_cast<double>(g.edge_count()));
}

std::size_t common_neighbors(const BipartiteGraph& g, std::size_t a,
                             std::size_t b) {
  std::size_t n = g.left_count + g.right_count;
  if (a >= n || b >= n) {
    throw std::out_of_range("common_neighbors: index out of range");
  }
  auto neighbors = [&g](std::size_t node) {
    std::vector<std::size_t> out;
    if (node < g.left_count) {
      for (const Edge& e : g.edges) {
        if (e.left == node) out.push_back(g.left_count + e.right);
      }
    } else {
      std::size_t w = node - g.left_count;
      for (const Edge& e : g.edges) {
        if (e.right == w) out.push_back(e.left);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  std::vector<std::size_t> na = neighbors(a), nb = neighbors(b);
  std::vector<std::size_t> both;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                        std::back_inserter(both));
  return both.size();
}

std::vector<std::pair<unsigned, double>> taylor_weights(
    const SpectralTransform& t, unsigned max_power) {
  std::vector<std::pair<unsigned, double>> out;
  if (const Sinh* f = std::get_if<Sinh>(&t)) {
    for (unsigned p = 1; p <= max_power; p += 2) {
      double fact = 1.0;
      for (unsigned i = 2; i <= p; ++i) fact *= i;
      out.emplace_back(p, f->beta * std::pow(f->alpha, p) / fact);
    }
  } else if (const OddNeumann* f = std::get_if<OddNeumann>(&t)) {
    for (unsigned p = 1; p <= max_power; p += 2) {
      out.emplace_back(p, f->beta * std::pow(f->alpha, p));
    }
  } else {
    throw std::invalid_argument(
        "taylor_weights defined for sinh and neumann families only");
  }
  return out;
}

std::string serialize_transform(const SpectralTransform& t) {
  std::ostringstream out;
  out.precision(17);
  out << "family=" << family_name(t) << '\n';
  struct Visitor {
    std::ostringstream& out;
    void operator()(const Sinh& f) const {
      out << "alpha=" << f.alpha << "\nbeta=" << f.beta << '\n';
    }
    void operator()(const OddNeumann& f) const {
      out << "alpha=" << f.alpha << "\nbeta=" << f.beta << '\n';
    }
    void operator()(const RankReduction& f) const {
      out << "keep=" << f.keep << "\nbeta=" << f.beta << '\n';
    }
    void operator()(const OddPolynomial& f) const {
      out << "coeffs=";
      for (std::size_t j = 0; j < f.coeffs.size(); ++j) {
        out << (j ? "," : "") << f.coeffs[j];
      }
      out << '\n';
    }
    void operator()(const NonnegOddPolynomial& f) const {
      out << "coeffs=";
      for (std::size_t j = 0; j < f.coeffs.size(); ++j) {
        out << (j ? "," : "") << f.coeffs[j];
      }
      out << '\n';
    }
    void operator()(const Exp& f) const {
      out << "alpha=" << f.alpha << "\nbeta=" << f.beta << '\n';
    }
  };
  std::visit(Visitor{out}, t);
  return out.str();
}

SpectralTransform parse_transform(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string family;
  double alpha = 0.0, beta = 1.0;
  std::size_t keep = 1;
  std::vector<double> coeffs;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("transform record: expected key=value, got '" + line + "'");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    try {
      if (key == "family") {
        family = value;
      } else if (key == "alpha") {
        alpha = std::stod(value);
      } else if (key == "beta") {
        beta = std::stod(value);
      } else if (key == "keep") {
        keep = static_cast<std::size_t>(std::stoull(value));
      } else if (key == "coeffs") {
        std::istringstream cs(value);
        std::string tok;
        while (std::getline(cs, tok, ',')) coeffs.push_back(std::stod(tok));
      }
      // unknown keys (residual etc.) are ignored
    } catch (const std::exception&) {
      throw ParseError("transform record: bad value for '" + key + "'");
    }
  }
  if (family == "sinh") return Sinh{alpha, beta};
  if (family == "neumann") return OddNeumann{alpha, beta};
  if (family == "reduction") return RankReduction{keep, beta};
  if (family == "poly") return OddPolynomial{std::move(coeffs)};
  if (family == "nnpoly") return NonnegOddPolynomial{std::move(coeffs)};
  if (family == "exp") return Exp{alpha, beta};
  throw ParseError("transform record: unknown family '" + family + "'");
}

}  // namespace oddlink
