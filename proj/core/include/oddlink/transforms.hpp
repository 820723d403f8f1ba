#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oddlink/graph.hpp"
#include "oddlink/svd.hpp"

namespace oddlink {

// Spectral transformation families. Every family except Exp is an odd
// function of the spectrum; Exp exists only for the bipartivity
// comparison and is rejected as a bipartite predictor.

struct Sinh {
  double alpha = 1.0;
  double beta = 1.0;  // f(s) = beta * sinh(alpha * s)
};

struct OddNeumann {
  double alpha = 1.0;
  double beta = 1.0;  // f(s) = beta * alpha * s / (1 - alpha^2 s^2)
};

struct RankReduction {
  std::size_t keep = 1;  // k': number of leading singular values retained
  double beta = 1.0;     // f(s_i) = beta * s_i when |s_i| >= s_{k'}, else 0
};

struct OddPolynomial {
  std::vector<double> coeffs;  // c_j for power 2j+1
};

struct NonnegOddPolynomial {
  std::vector<double> coeffs;  // all c_j >= 0
};

struct Exp {
  double alpha = 1.0;
  double beta = 1.0;  // f(l) = beta * exp(alpha * l)
};

using SpectralTransform = std::variant<Sinh, OddNeumann, RankReduction,
                                       OddPolynomial, NonnegOddPolynomial, Exp>;

std::string family_name(const SpectralTransform& t);
bool is_odd_family(const SpectralTransform& t);

/// Scalar f(sigma). RankReduction needs `context`: the model's singular
/// values sorted nonincreasing. Throws NumericalError on a von Neumann
/// pole (|alpha sigma| >= 1) or exp/sinh overflow (|alpha sigma| > 700).
double eval_transform(const SpectralTransform& t, double sigma,
                      std::span<const double> context = {});

/// f(sigma_i) for every retained singular value of the model.
std::vector<double> transform_values(const SvdModel& model,
                                     const SpectralTransform& t);

/// Link prediction score sum_i f(sigma_i) U_{u,i} V_{w,i}. Rejects Exp.
double score(const SvdModel& model, const SpectralTransform& t, std::size_t u,
             std::size_t w);

/// Scores of left node u against every right node.
std::vector<double> score_row(const SvdModel& model, const SpectralTransform& t,
                              std::size_t u);

/// The n highest-scoring right nodes for u, excluding `exclude` (typically
/// the training neighbors). Ties broken by ascending right index.
std::vector<std::pair<std::size_t, double>> top_n(
    const SvdModel& model, const SpectralTransform& t, std::size_t u,
    std::size_t n, const std::vector<bool>& exclude);

/// d(u) d(w) / (2|E|).
double preferential_attachment(const BipartiteGraph& g, std::size_t u,
                               std::size_t w);

/// |N(a) n N(b)| in the block adjacency; a, b are block indices in
/// [0, left_count + right_count).
std::size_t common_neighbors(const BipartiteGraph& g, std::size_t a,
                             std::size_t b);

/// Taylor path weights (power, coefficient) for powers 1, 3, ... up to
/// max_power. Defined for Sinh and OddNeumann only.
std::vector<std::pair<unsigned, double>> taylor_weights(
    const SpectralTransform& t, unsigned max_power);

/// Key-value text record round-trip for CLI handoff.
std::string serialize_transform(const SpectralTransform& t);
SpectralTransform parse_transform(const std::string& text);

}  // namespace oddlink
