#include "oddlink/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "oddlink/errors.hpp"

namespace oddlink {

namespace {

void write_row(std::ostream& out, const double* values, std::size_t n) {
  char buf[40];
  for (std::size_t j = 0; j < n; ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[j]);
    out << (j ? "\t" : "") << buf;
  }
  out << '\n';
}

std::vector<double> read_row(std::istream& in, std::size_t n, const char* what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(std::string("model file truncated in ") + what);
  }
  std::istringstream ss(line);
  std::vector<double> row(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(ss >> row[j])) {
      throw ParseError(std::string("model file: short row in ") + what);
    }
  }
  return row;
}

}  // namespace

void save_model(std::ostream& out, const ModelFile& m) {
  const SvdModel& s = m.model;
  out << "oddlink-svd\t1\n";
  out << s.rows << '\t' << s.cols << '\t' << s.rank << '\t' << s.seed << '\n';
  write_row(out, s.singular_values.data(), s.rank);
  for (std::size_t i = 0; i < s.rows; ++i) {
    write_row(out, &s.left_vectors[i * s.rank], s.rank);
  }
  for (std::size_t i = 0; i < s.cols; ++i) {
    write_row(out, &s.right_vectors[i * s.rank], s.rank);
  }
  out << "labels\n";
  for (const std::string& l : m.left_labels) out << l << '\n';
  for (const std::string& l : m.right_labels) out << l << '\n';
  out << "edges\t" << m.train_edges.size() << '\n';
  for (const auto& [u, w] : m.train_edges) out << u << '\t' << w << '\n';
}

ModelFile load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("oddlink-svd", 0) != 0) {
    throw ParseError("not an oddlink model file");
  }
  ModelFile m;
  SvdModel& s = m.model;
  if (!(in >> s.rows >> s.cols >> s.rank >> s.seed)) {
    throw ParseError("model file: bad header");
  }
  std::getline(in, line);  // consume end of header line

  s.singular_values = read_row(in, s.rank, "singular values");
  s.left_vectors.resize(s.rows * s.rank);
  for (std::size_t i = 0; i < s.rows; ++i) {
    std::vector<double> row = read_row(in, s.rank, "left vectors");
    std::copy(row.begin(), row.end(), s.left_vectors.begin() + static_cast<std::ptrdiff_t>(i * s.rank));
  }
  s.right_vectors.resize(s.cols * s.rank);
  for (std::size_t i = 0; i < s.cols; ++i) {
    std::vector<double> row = read_row(in, s.rank, "right vectors");
    std::copy(row.begin(), row.end(), s.right_vectors.begin() + static_cast<std::ptrdiff_t>(i * s.rank));
  }

  if (!std::getline(in, line) || line != "labels") {
    throw ParseError("model file: missing labels section");
  }
  m.left_labels.resize(s.rows);
  for (std::size_t i = 0; i < s.rows; ++i) {
    if (!std::getline(in, m.left_labels[i])) {
      throw ParseError("model file truncated in left labels");
    }
  }
  m.right_labels.resize(s.cols);
  for (std::size_t i = 0; i < s.cols; ++i) {
    if (!std::getline(in, m.right_labels[i])) {
      throw ParseError("model file truncated in right labels");
    }
  }

  if (!std::getline(in, line) || line.rfind("edges\t", 0) != 0) {
    throw ParseError("model file: missing edges section");
  }
  std::size_t n_edges = std::stoull(line.substr(6));
  m.train_edges.resize(n_edges);
  for (std::size_t i = 0; i < n_edges; ++i) {
    if (!(in >> m.train_edges[i].first >> m.train_edges[i].second)) {
      throw ParseError("model file truncated in edges");
    }
  }
  return m;
}

}  // namespace oddlink
