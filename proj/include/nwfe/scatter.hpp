#pragma once

#include <span>

#include "nwfe/dataset.hpp"
#include "nwfe/weights.hpp"

namespace nwfe {

/// Nonparametric between-class and within-class scatter matrices.
struct ScatterPair {
  Matrix between;
  Matrix within;
};

/// How a class with a single sample is treated in the within-class scatter.
enum class SingletonPolicy {
  Reject,      ///< throw SingletonClass
  ZeroWithin,  ///< contributes nothing, matching the streaming engine
};

/// sum_l lambda_l (x_l - m_j(x_l)) (x_l - m_j(x_l))^T over the members of
/// class i, unnormalised. `lambda` is aligned with `members_i`; an empty
/// `lambda` yields the zero matrix. The result is exactly symmetric.
Matrix scatter_block(std::span<const Vector> samples, std::span<const std::size_t> members_i,
                     const LocalMeans& means, int j, std::span<const double> lambda);

/// Block (i, j) for a batch weight set.
Matrix pair_block(const LabeledDataset& ds, const NwfeWeights& w, int i, int j);

/// (1/N) sum_i sum_{j != i} block(i, j). Throws FewerThanTwoClasses.
Matrix between_scatter(const LabeledDataset& ds, const NwfeWeights& w);

/// (1/N) sum_i block(i, i), own sample excluded from its local mean.
Matrix within_scatter(const LabeledDataset& ds, const NwfeWeights& w,
                      SingletonPolicy singletons = SingletonPolicy::Reject);

/// Distances, weights and both scatters in one call.
ScatterPair batch_scatters(const LabeledDataset& ds, SingletonPolicy singletons = SingletonPolicy::Reject);

/// S_b alone, skipping all within-class quantities.
Matrix batch_between_scatter(const LabeledDataset& ds);

/// 0.5 S_w + 0.5 diag(S_w). Throws ZeroDiagonal if a diagonal entry is not
/// strictly positive.
Matrix regularize(const Matrix& within);

/// ||a - b||_F / ||b||_F, or the absolute gap when b is zero.
double relative_frobenius_gap(const Matrix& a, const Matrix& b);

}  // namespace nwfe
