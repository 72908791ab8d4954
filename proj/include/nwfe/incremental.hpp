#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nwfe/dataset.hpp"
#include "nwfe/distance.hpp"
#include "nwfe/scatter.hpp"
#include "nwfe/weights.hpp"

namespace nwfe {

enum class ArrivalCase { ExistingClass, NewClass };

/// An ordered class pair (from, to). from == to names the within-class block.
struct BlockId {
  int from = 0;
  int to = 0;
  friend bool operator==(const BlockId&, const BlockId&) = default;
};

struct ArrivalReport {
  ArrivalCase kind = ArrivalCase::ExistingClass;
  int class_id = 0;  ///< internal class index of the arrival
  std::vector<BlockId> recomputed_blocks;
  /// Local means m_j(x) recomputed, i.e. (sample, class) weight vectors.
  std::size_t weight_recomputations = 0;
  /// Scatter-weight vectors lambda^(i,j) renormalised.
  std::size_t lambda_recomputations = 0;
  double seconds = 0.0;
};

/// NWFE scatter matrices maintained under one-sample-at-a-time arrival.
///
/// The state caches the distance table, every local mean m_j(x) with its
/// distance, every scatter-weight vector lambda^(i,j), and the unnormalised
/// per-pair blocks
///
///     B[i][j] = sum_l lambda_l^(i,j) (x_l^i - m_j(x_l^i)) (.)^T
///
/// so that S_b = (1/N) sum_{i != j} B[i][j] and S_w = (1/N) sum_i B[i][i].
/// An arrival recomputes only the quantities whose inputs changed; the result
/// always equals a batch computation on the accumulated samples.
///
/// A class with one sample has a pending within block (zero contribution)
/// that activates when its second sample arrives.
///
/// Single writer: updates must not overlap with each other or with reads.
class IncrementalState {
 public:
  /// Batch computation on `ds`. Throws FewerThanTwoClasses.
  explicit IncrementalState(const LabeledDataset& ds);

  /// Dispatches on whether `label` names a known class. Labels are the
  /// external ids used in `ds` at construction; an unseen label opens a new
  /// class named `name` (or the decimal label if empty).
  ArrivalReport add_sample(const Vector& y, int label, const std::string& name = {});

  /// `cls` is an internal class index.
  ArrivalReport update_existing_class(const Vector& y, int cls);
  ArrivalReport update_new_class(const Vector& y, int label, const std::string& name = {});

  /// (1/N)-scaled block sums. Does not mutate the state.
  ScatterPair materialize() const;

  std::size_t size() const { return samples_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t num_classes() const { return members_.size(); }

  /// Accumulated samples with internal class ids, in arrival order.
  LabeledDataset dataset() const;

  std::span<const std::size_t> members(int cls) const { return members_[static_cast<std::size_t>(cls)]; }
  int class_label(int cls) const { return class_labels_[static_cast<std::size_t>(cls)]; }
  std::optional<int> class_of_label(int label) const;
  const std::vector<std::string>& class_names() const { return class_names_; }

  const Matrix& block(int from, int to) const {
    return blocks_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
  }
  bool within_pending(int cls) const { return members(cls).size() < 2; }
  const LocalMean& local_mean(std::size_t sample, int cls) const {
    return means_[sample][static_cast<std::size_t>(cls)];
  }
  std::span<const double> lambda(int i, int j) const {
    return lambda_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const DistanceTable& distances() const { return dist_; }

  /// Versioned JSON snapshot holding samples, class map, local means,
  /// scatter weights and blocks. Distances are recomputed on restore.
  nlohmann::json snapshot() const;
  static IncrementalState restore(const nlohmann::json& j);

 private:
  IncrementalState() = default;

  std::size_t append_sample(const Vector& y, int cls);
  void refresh_lambda(int i, int j, ArrivalReport& report);
  void rebuild_block(int i, int j, ArrivalReport& report);

  std::size_t dim_ = 0;
  std::vector<Vector> samples_;
  std::vector<int> sample_class_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<int> class_labels_;
  std::vector<std::string> class_names_;
  DistanceTable dist_;
  LocalMeans means_;
  std::vector<std::vector<std::vector<double>>> lambda_;
  std::vector<std::vector<Matrix>> blocks_;
};

std::string_view to_string(ArrivalCase kind);

}  // namespace nwfe
