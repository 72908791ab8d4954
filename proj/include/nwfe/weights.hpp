#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nwfe/dataset.hpp"
#include "nwfe/distance.hpp"

namespace nwfe {

/// Normalised inverse-distance weights: w_k = d_k^-1 / sum_t d_t^-1.
///
/// If any distance is exactly zero the unit mass is split uniformly over the
/// zero entries and every other entry gets 0, which is the limit of the
/// formula as those distances shrink. The input must be non-empty.
std::vector<double> inverse_distance_weights(std::span<const double> distances);

/// Weights of one sample over the members of a target class. When the target
/// is the sample's own class the sample itself is excluded from `targets`.
struct PairWeights {
  int target_class = 0;
  std::vector<std::size_t> targets;
  std::vector<double> weights;
};

/// Throws EmptyTargetClass when the sample is the only member of its own
/// target class.
PairWeights pair_weights(const LabeledDataset& ds, const DistanceTable& dist, std::size_t sample,
                         int target_class);

/// sum_k w_k x_k over the targets.
Vector weighted_mean(const LabeledDataset& ds, const PairWeights& w);

/// Weighted mean m_j(x) of one sample in one class, and the distance from the
/// sample to it. `defined` is false for a sample whose own class has no other
/// member.
struct LocalMean {
  Vector mean;
  double distance = 0.0;
  bool defined = false;
};

/// [sample][class]
using LocalMeans = std::vector<std::vector<LocalMean>>;

/// Computes m_j(x_s) from the distance table directly; `members` is the
/// membership of class j and `s` is skipped if it appears there.
LocalMean local_mean(std::span<const Vector> samples, const DistanceTable& dist, std::size_t s,
                     std::span<const std::size_t> members);

/// Scatter weights lambda^(i,j) for every member of class i, in member order.
/// Empty when (i,i) is undefined because class i is a singleton.
std::vector<double> scatter_weights(const LocalMeans& means, std::span<const std::size_t> members_i, int j);

/// Per-ordered-pair quantities for a fixed dataset.
struct NwfeWeights {
  std::size_t num_classes = 0;
  LocalMeans means;
  /// [sample][class]; only filled when requested.
  std::vector<std::vector<PairWeights>> pair;
  /// [i][j], aligned with ds.members(i).
  std::vector<std::vector<std::vector<double>>> lambda;
};

struct WeightOptions {
  bool keep_pair_weights = false;
  /// Skip the (i,i) quantities; enough for the between-class scatter alone.
  bool include_within = true;
};

NwfeWeights compute_weights(const LabeledDataset& ds, const DistanceTable& dist, WeightOptions opts = {});

}  // namespace nwfe
