#include "nwfe/weights.hpp"

#include "nwfe/error.hpp"

namespace nwfe {

std::vector<double> inverse_distance_weights(std::span<const double> distances) {
  if (distances.empty()) throw Error(ErrorKind::InvalidArgument, "no distances to weight");
  std::vector<double> w(distances.size(), 0.0);

  std::size_t zeros = 0;
  for (double d : distances) zeros += (d == 0.0);
  if (zeros > 0) {
    const double share = 1.0 / static_cast<double>(zeros);
    for (std::size_t k = 0; k < distances.size(); ++k) {
      if (distances[k] == 0.0) w[k] = share;
    }
    return w;
  }

  double total = 0.0;
  for (std::size_t k = 0; k < distances.size(); ++k) {
    w[k] = 1.0 / distances[k];
    total += w[k];
  }
  for (double& v : w) v /= total;
  return w;
}

PairWeights pair_weights(const LabeledDataset& ds, const DistanceTable& dist, std::size_t sample,
                         int target_class) {
  PairWeights out;
  out.target_class = target_class;
  std::vector<double> d;
  for (auto k : ds.members(target_class)) {
    if (k == sample) continue;
    out.targets.push_back(k);
    d.push_back(dist(sample, k));
  }
  if (out.targets.empty()) {
    throw Error(ErrorKind::EmptyTargetClass,
                "sample " + std::to_string(sample) + " is the only member of class " + std::to_string(target_class));
  }
  out.weights = inverse_distance_weights(d);
  return out;
}

Vector weighted_mean(const LabeledDataset& ds, const PairWeights& w) {
  Vector m = Vector::Zero(static_cast<Eigen::Index>(ds.dim()));
  for (std::size_t k = 0; k < w.targets.size(); ++k) m.noalias() += w.weights[k] * ds.sample(w.targets[k]);
  return m;
}

LocalMean local_mean(std::span<const Vector> samples, const DistanceTable& dist, std::size_t s,
                     std::span<const std::size_t> members) {
  thread_local std::vector<double> d;
  thread_local std::vector<std::size_t> targets;
  d.clear();
  targets.clear();
  const auto row = dist.row(s);
  for (auto k : members) {
    if (k == s) continue;
    targets.push_back(k);
    d.push_back(row[k]);
  }
  LocalMean out;
  if (targets.empty()) return out;

  // m - x = sum_k (x_k - x) / d_k / sum_k 1/d_k. Summing unit directions keeps
  // cancellation exact where it can be: in one dimension they are exactly +-1,
  // so a sample with as many targets on each side sits exactly on its mean.
  const Vector& x = samples[s];
  if (targets.size() == 1) {
    out.mean = samples[targets[0]];
    out.distance = d[0];
    out.defined = true;
    return out;
  }
  Vector offset = Vector::Zero(x.size());
  std::size_t zeros = 0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (d[k] == 0.0) {
      offset.noalias() += samples[targets[k]] - x;
      ++zeros;
    }
  }
  if (zeros > 0) {
    // Zero-distance rule: uniform mass over the coincident targets.
    offset /= static_cast<double>(zeros);
  } else {
    double total = 0.0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      offset.noalias() += (samples[targets[k]] - x) / d[k];
      total += 1.0 / d[k];
    }
    offset /= total;
  }
  out.mean = x + offset;
  out.distance = offset.norm();
  out.defined = true;
  return out;
}

std::vector<double> scatter_weights(const LocalMeans& means, std::span<const std::size_t> members_i, int j) {
  std::vector<double> d;
  d.reserve(members_i.size());
  for (auto s : members_i) {
    const auto& lm = means[s][static_cast<std::size_t>(j)];
    if (!lm.defined) return {};
    d.push_back(lm.distance);
  }
  return inverse_distance_weights(d);
}

NwfeWeights compute_weights(const LabeledDataset& ds, const DistanceTable& dist, WeightOptions opts) {
  if (ds.has_empty_class()) throw Error(ErrorKind::InvalidArgument, "every class needs at least one sample");
  const std::size_t n = ds.size();
  const std::size_t classes = ds.num_classes();
  NwfeWeights out;
  out.num_classes = classes;
  out.means.assign(n, std::vector<LocalMean>(classes));
  if (opts.keep_pair_weights) out.pair.assign(n, std::vector<PairWeights>(classes));

  for (std::size_t s = 0; s < n; ++s) {
    const int own = ds.label(s);
    for (std::size_t j = 0; j < classes; ++j) {
      const int target = static_cast<int>(j);
      if (target == own && !opts.include_within) continue;
      out.means[s][j] = local_mean(ds.samples(), dist, s, ds.members(target));
      if (opts.keep_pair_weights && out.means[s][j].defined) {
        out.pair[s][j] = pair_weights(ds, dist, s, target);
      }
    }
  }

  out.lambda.assign(classes, std::vector<std::vector<double>>(classes));
  for (std::size_t i = 0; i < classes; ++i) {
    for (std::size_t j = 0; j < classes; ++j) {
      if (i == j && !opts.include_within) continue;
      out.lambda[i][j] = scatter_weights(out.means, ds.members(static_cast<int>(i)), static_cast<int>(j));
    }
  }
  return out;
}

}  // namespace nwfe
