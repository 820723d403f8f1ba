#pragma once

#include <span>
#include <vector>

#include "oddlink/small_dense.hpp"

namespace oddlink {

/// Nonnegative least squares min ||A c - b|| s.t. c >= 0, by the
/// Lawson-Hanson active set method.
std::vector<double> nnls(const DenseMatrix& a, std::span<const double> b,
                         std::size_t max_iter = 0);

}  // namespace oddlink
