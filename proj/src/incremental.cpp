#include "nwfe/incremental.hpp"

#include <chrono>
#include <cmath>

#include "nwfe/error.hpp"
#include "nwfe/log.hpp"

namespace nwfe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(ArrivalCase kind) {
  return kind == ArrivalCase::ExistingClass ? "existing-class" : "new-class";
}

IncrementalState::IncrementalState(const LabeledDataset& ds) {
  if (ds.num_classes() < 2) {
    throw Error(ErrorKind::FewerThanTwoClasses, "incremental NWFE needs at least two classes at init");
  }
  if (ds.has_empty_class()) throw Error(ErrorKind::InvalidArgument, "every class needs at least one sample");
  dim_ = ds.dim();
  samples_.assign(ds.samples().begin(), ds.samples().end());
  sample_class_.assign(ds.labels().begin(), ds.labels().end());
  const auto classes = ds.num_classes();
  for (std::size_t c = 0; c < classes; ++c) {
    const auto m = ds.members(static_cast<int>(c));
    members_.emplace_back(m.begin(), m.end());
    class_labels_.push_back(static_cast<int>(c));
  }
  class_names_ = ds.label_names();

  dist_ = pairwise_distances(ds);
  auto w = compute_weights(ds, dist_);
  means_ = std::move(w.means);
  lambda_ = std::move(w.lambda);

  blocks_.assign(classes, std::vector<Matrix>(classes));
  ArrivalReport scratch;
  for (std::size_t i = 0; i < classes; ++i) {
    for (std::size_t j = 0; j < classes; ++j) rebuild_block(static_cast<int>(i), static_cast<int>(j), scratch);
  }
}

std::optional<int> IncrementalState::class_of_label(int label) const {
  for (std::size_t c = 0; c < class_labels_.size(); ++c) {
    if (class_labels_[c] == label) return static_cast<int>(c);
  }
  return std::nullopt;
}

ArrivalReport IncrementalState::add_sample(const Vector& y, int label, const std::string& name) {
  if (static_cast<std::size_t>(y.size()) != dim_) {
    throw Error(ErrorKind::DimensionMismatch,
                "sample has dimension " + std::to_string(y.size()) + ", state expects " + std::to_string(dim_));
  }
  if (!y.allFinite()) throw Error(ErrorKind::InvalidArgument, "sample has non-finite entries");
  if (auto cls = class_of_label(label)) return update_existing_class(y, *cls);
  return update_new_class(y, label, name);
}

std::size_t IncrementalState::append_sample(const Vector& y, int cls) {
  const std::size_t n = samples_.size();
  std::vector<double> row(n);
  for (std::size_t a = 0; a < n; ++a) row[a] = (samples_[a] - y).norm();
  dist_.append(row);
  samples_.push_back(y);
  sample_class_.push_back(cls);
  members_[static_cast<std::size_t>(cls)].push_back(n);
  return n;
}

void IncrementalState::refresh_lambda(int i, int j, ArrivalReport& report) {
  lambda_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = scatter_weights(means_, members(i), j);
  ++report.lambda_recomputations;
}

void IncrementalState::rebuild_block(int i, int j, ArrivalReport& report) {
  blocks_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
      scatter_block(samples_, members(i), means_, j, lambda(i, j));
  report.recomputed_blocks.push_back({i, j});
}

ArrivalReport IncrementalState::update_existing_class(const Vector& y, int cls) {
  const auto start = Clock::now();
  if (cls < 0 || static_cast<std::size_t>(cls) >= num_classes()) {
    throw Error(ErrorKind::InvalidArgument, "unknown class index " + std::to_string(cls));
  }
  if (static_cast<std::size_t>(y.size()) != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "sample dimension differs from the state");
  }
  ArrivalReport report;
  report.kind = ArrivalCase::ExistingClass;
  report.class_id = cls;

  const int classes = static_cast<int>(num_classes());
  const auto e = static_cast<std::size_t>(cls);
  const std::size_t y_idx = append_sample(y, cls);
  means_.emplace_back(num_classes());

  // The new sample's local mean in every class.
  for (int j = 0; j < classes; ++j) {
    means_[y_idx][static_cast<std::size_t>(j)] = nwfe::local_mean(samples_, dist_, y_idx, members(j));
    ++report.weight_recomputations;
  }
  // m_E(x) changed for every other sample, in class E or not.
  for (std::size_t s = 0; s < y_idx; ++s) {
    means_[s][e] = nwfe::local_mean(samples_, dist_, s, members(cls));
    ++report.weight_recomputations;
  }

  // lambda^(E,j): class E gained a member. lambda^(i,E): m_E moved.
  for (int j = 0; j < classes; ++j) refresh_lambda(cls, j, report);
  for (int i = 0; i < classes; ++i) {
    if (i != cls) refresh_lambda(i, cls, report);
  }

  for (int j = 0; j < classes; ++j) rebuild_block(cls, j, report);
  for (int i = 0; i < classes; ++i) {
    if (i != cls) rebuild_block(i, cls, report);
  }

  report.seconds = seconds_since(start);
  logger().debug("arrival {} at class {}: {} local means, {} blocks", size(), cls, report.weight_recomputations,
                 report.recomputed_blocks.size());
  return report;
}

ArrivalReport IncrementalState::update_new_class(const Vector& y, int label, const std::string& name) {
  const auto start = Clock::now();
  if (static_cast<std::size_t>(y.size()) != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "sample dimension differs from the state");
  }
  if (class_of_label(label)) {
    throw Error(ErrorKind::InvalidArgument, "label " + std::to_string(label) + " already has a class");
  }
  const int fresh = static_cast<int>(num_classes());
  const auto k = static_cast<std::size_t>(fresh);
  ArrivalReport report;
  report.kind = ArrivalCase::NewClass;
  report.class_id = fresh;

  members_.emplace_back();
  class_labels_.push_back(label);
  class_names_.push_back(name.empty() ? std::to_string(label) : name);
  const std::size_t y_idx = append_sample(y, fresh);

  // Every earlier sample gains m_{L+1}(x) = y.
  for (std::size_t s = 0; s < y_idx; ++s) {
    means_[s].push_back(nwfe::local_mean(samples_, dist_, s, members(fresh)));
    ++report.weight_recomputations;
  }
  means_.emplace_back(num_classes());
  for (int j = 0; j < fresh; ++j) {
    means_[y_idx][static_cast<std::size_t>(j)] = nwfe::local_mean(samples_, dist_, y_idx, members(j));
    ++report.weight_recomputations;
  }

  for (auto& row : lambda_) row.emplace_back();
  lambda_.emplace_back(num_classes());
  for (int j = 0; j < fresh; ++j) refresh_lambda(fresh, j, report);
  for (int i = 0; i < fresh; ++i) refresh_lambda(i, fresh, report);

  for (auto& row : blocks_) row.emplace_back();
  blocks_.emplace_back(num_classes());
  blocks_[k][k] = Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (int j = 0; j < fresh; ++j) rebuild_block(fresh, j, report);
  for (int i = 0; i < fresh; ++i) rebuild_block(i, fresh, report);

  report.seconds = seconds_since(start);
  logger().debug("arrival {} opens class {} (label {})", size(), fresh, label);
  return report;
}

ScatterPair IncrementalState::materialize() const {
  if (num_classes() < 2) throw Error(ErrorKind::FewerThanTwoClasses, "need at least two classes");
  const auto p = static_cast<Eigen::Index>(dim_);
  ScatterPair out{Matrix::Zero(p, p), Matrix::Zero(p, p)};
  const int classes = static_cast<int>(num_classes());
  for (int i = 0; i < classes; ++i) {
    for (int j = 0; j < classes; ++j) {
      if (i != j) out.between += block(i, j);
    }
  }
  for (int i = 0; i < classes; ++i) {
    if (!within_pending(i)) out.within += block(i, i);
  }
  const double n = static_cast<double>(size());
  out.between /= n;
  out.within /= n;
  return out;
}

LabeledDataset IncrementalState::dataset() const { return LabeledDataset(samples_, sample_class_, class_names_); }

}  // namespace nwfe
