#pragma once

#include <cstddef>

#include "nwfe/dataset.hpp"
#include "nwfe/scatter.hpp"
#include "nwfe/subspace.hpp"

namespace nwfe {

/// Regularizes a copy of S_w and solves for the top `d` directions. If a
/// diagonal entry of S_w is zero, or the Cholesky factorization fails, a floor
/// of 1e-12 * trace(S_w) / p is added to the diagonal (with a warning) and the
/// solve is retried once.
Extractor extract(const ScatterPair& scatters, std::size_t d, std::vector<std::string> label_names = {});

struct BatchFit {
  Extractor extractor;
  ScatterPair scatters;
};

/// Full NWFE: distances, weights, local means, scatter weights, scatters,
/// regularization, eigen-extraction. Requires 1 <= d <= p, at least two
/// classes and at least two samples per class.
BatchFit fit_batch(const LabeledDataset& ds, std::size_t d);

}  // namespace nwfe
