#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "nwfe/dataset.hpp"

namespace nwfe {

/// Linear feature extractor: columns of `projection` are generalized
/// eigenvectors of (S_b, S_w_reg) in descending eigenvalue order, scaled so
/// that v^T S_w_reg v = 1, with their largest-magnitude entry positive.
struct Extractor {
  Matrix projection;  // p x d
  Vector eigenvalues; // d, descending
  /// Class names of the training data, for downstream classification.
  std::vector<std::string> label_names;

  std::size_t input_dim() const { return static_cast<std::size_t>(projection.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(projection.cols()); }
};

/// Solves S_b v = mu S_w_reg v by Cholesky whitening and keeps the top `d`
/// pairs. Throws NotPositiveDefinite if S_w_reg has no Cholesky factor and
/// InvalidArgument for shape errors or d outside 1..p.
Extractor solve(const Matrix& between, const Matrix& within_reg, std::size_t d);

/// Projects every row of `x` (N x p) to N x d.
Matrix project(const Extractor& ex, const Matrix& x);
Vector project(const Extractor& ex, const Vector& x);

nlohmann::json to_json(const Extractor& ex);
Extractor extractor_from_json(const nlohmann::json& j);

}  // namespace nwfe
