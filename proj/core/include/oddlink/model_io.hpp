#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "oddlink/graph.hpp"
#include "oddlink/svd.hpp"

namespace oddlink {

/// A saved factorization plus everything `predict` needs: the original
/// node labels and the training edges (for exclusion).
struct ModelFile {
  SvdModel model;
  std::vector<std::string> left_labels;
  std::vector<std::string> right_labels;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> train_edges;
};

/// Flat TSV container: header with dims/rank/seed, then sigma, U, V
/// row-major at full precision, label and edge sections.
void save_model(std::ostream& out, const ModelFile& m);
ModelFile load_model(std::istream& in);

}  // namespace oddlink
