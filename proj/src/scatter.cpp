#include "nwfe/scatter.hpp"

#include "nwfe/error.hpp"

namespace nwfe {

Matrix scatter_block(std::span<const Vector> samples, std::span<const std::size_t> members_i,
                     const LocalMeans& means, int j, std::span<const double> lambda) {
  const auto p = samples.empty() ? Eigen::Index{0} : samples.front().size();
  Matrix block = Matrix::Zero(p, p);
  if (lambda.empty()) return block;

  Vector diff(p);
  for (std::size_t k = 0; k < members_i.size(); ++k) {
    const auto s = members_i[k];
    const double weight = lambda[k];
    if (weight == 0.0) continue;
    diff = samples[s] - means[s][static_cast<std::size_t>(j)].mean;
    // Lower triangle, then mirror: keeps the block exactly symmetric.
    for (Eigen::Index b = 0; b < p; ++b) {
      for (Eigen::Index a = b; a < p; ++a) block(a, b) += weight * (diff[a] * diff[b]);
    }
  }
  block.triangularView<Eigen::StrictlyUpper>() = block.transpose();
  return block;
}

Matrix pair_block(const LabeledDataset& ds, const NwfeWeights& w, int i, int j) {
  return scatter_block(ds.samples(), ds.members(i), w.means, j,
                       w.lambda[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
}

Matrix between_scatter(const LabeledDataset& ds, const NwfeWeights& w) {
  if (ds.num_classes() < 2) {
    throw Error(ErrorKind::FewerThanTwoClasses, "between-class scatter needs at least two classes");
  }
  const auto p = static_cast<Eigen::Index>(ds.dim());
  Matrix sb = Matrix::Zero(p, p);
  const int classes = static_cast<int>(ds.num_classes());
  for (int i = 0; i < classes; ++i) {
    for (int j = 0; j < classes; ++j) {
      if (i != j) sb += pair_block(ds, w, i, j);
    }
  }
  return sb / static_cast<double>(ds.size());
}

Matrix within_scatter(const LabeledDataset& ds, const NwfeWeights& w, SingletonPolicy singletons) {
  const auto p = static_cast<Eigen::Index>(ds.dim());
  Matrix sw = Matrix::Zero(p, p);
  const int classes = static_cast<int>(ds.num_classes());
  for (int i = 0; i < classes; ++i) {
    if (ds.members(i).size() < 2) {
      if (singletons == SingletonPolicy::Reject) {
        throw Error(ErrorKind::SingletonClass, "class '" + ds.label_names()[static_cast<std::size_t>(i)] +
                                                   "' has a single sample; its within-class mean is undefined");
      }
      continue;
    }
    sw += pair_block(ds, w, i, i);
  }
  return sw / static_cast<double>(ds.size());
}

ScatterPair batch_scatters(const LabeledDataset& ds, SingletonPolicy singletons) {
  const auto dist = pairwise_distances(ds);
  const auto w = compute_weights(ds, dist);
  return {between_scatter(ds, w), within_scatter(ds, w, singletons)};
}

Matrix batch_between_scatter(const LabeledDataset& ds) {
  const auto dist = pairwise_distances(ds);
  const auto w = compute_weights(ds, dist, {.keep_pair_weights = false, .include_within = false});
  return between_scatter(ds, w);
}

Matrix regularize(const Matrix& within) {
  for (Eigen::Index d = 0; d < within.rows(); ++d) {
    if (!(within(d, d) > 0.0)) {
      throw Error(ErrorKind::ZeroDiagonal,
                  "feature " + std::to_string(d) + " has zero within-class weighted variance");
    }
  }
  Matrix out = 0.5 * within;
  out.diagonal() = within.diagonal();
  return out;
}

double relative_frobenius_gap(const Matrix& a, const Matrix& b) {
  const double gap = (a - b).norm();
  const double scale = b.norm();
  return scale > 0.0 ? gap / scale : gap;
}

}  // namespace nwfe
