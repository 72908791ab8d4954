#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nwfe/dataset.hpp"
#include "nwfe/incremental.hpp"
#include "nwfe/subspace.hpp"

namespace nwfe {

enum class Mode { Batch, Incremental };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// Stratified k-fold assignment: each class is shuffled, the classes are
/// concatenated, and position t goes to fold t mod k. Fold sizes differ by at
/// most one and every fold receives a proportional share of each class.
std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& ds, std::size_t folds,
                                                       std::uint64_t seed);

/// Split of a training set into an initial batch and a streamed remainder.
struct StreamPlan {
  std::vector<std::size_t> init;      ///< ascending
  std::vector<std::size_t> arrivals;  ///< arrival order
};

/// Takes round(fraction * N_c) samples of each class (at least 2, at most N_c)
/// for the initial batch; the rest arrive in a seeded uniform order.
StreamPlan plan_stream(const LabeledDataset& train, double init_fraction, std::uint64_t seed);

/// Builds the state from `plan.init` and streams `plan.arrivals`.
IncrementalState run_stream(const LabeledDataset& train, const StreamPlan& plan);

/// Fit an extractor on the state's current scatters and score 1-NN on `test`
/// using the accumulated samples as the reference set.
double evaluate_state(const IncrementalState& state, const LabeledDataset& test, std::size_t dim);

/// Batch fit on `train`, 1-NN accuracy on `test`.
double evaluate_batch(const LabeledDataset& train, const LabeledDataset& test, std::size_t dim);

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Mean and std(rates) / sqrt(count), with the sample standard deviation.
/// `count` defaults to rates.size().
Interval confidence_interval(std::span<const double> rates, std::optional<std::size_t> count = std::nullopt);

struct CvOptions {
  std::size_t dim = 1;
  Mode mode = Mode::Batch;
  std::uint64_t seed = 0;
  double init_fraction = 0.2;
  std::size_t folds = 10;
  unsigned jobs = 1;
  /// Incremental mode only: also run batch NWFE on each training split and
  /// record the scatter gap and the batch accuracy.
  bool check_convergence = false;
};

struct FoldResult {
  std::size_t fold = 0;
  double accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t init_size = 0;
  std::size_t arrivals = 0;
  std::optional<double> between_gap;
  std::optional<double> within_gap;
  std::optional<double> batch_accuracy;
};

struct CvReport {
  Mode mode = Mode::Batch;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  double init_fraction = 0.0;
  std::vector<FoldResult> folds;
  double mean = 0.0;
  double half_width = 0.0;
};

/// Throws ClassMissingFromFold if some training split holds fewer than two
/// samples of a class.
CvReport tenfold_cv(const LabeledDataset& ds, const CvOptions& opts);

struct SweepReport {
  std::vector<CvReport> reports;  ///< d = 1..min(p, 15)
  std::size_t best_dim = 0;
  double best_mean = 0.0;
};

/// `base.dim` is ignored.
SweepReport dimension_sweep(const LabeledDataset& ds, CvOptions base);

struct Checkpoint {
  std::size_t samples_seen = 0;
  double accuracy = 0.0;
};

struct LearningCurve {
  std::vector<Checkpoint> checkpoints;
  std::size_t dim = 0;
  std::size_t test_size = 0;
  std::size_t init_size = 0;
  double batch_accuracy = 0.0;
  double final_between_gap = 0.0;
  double final_within_gap = 0.0;
};

/// Holds out fold 0 of a stratified 10-fold split, streams the rest and
/// re-solves every `stride` arrivals; the last arrival always closes a
/// checkpoint.
LearningCurve learning_curve(const LabeledDataset& ds, std::size_t dim, std::uint64_t seed, std::size_t stride,
                             double init_fraction = 0.2);

struct TimingChunk {
  std::size_t samples_seen = 0;  ///< chunk end, a multiple of the chunk size
  std::size_t arrivals = 0;
  double batch_seconds = 0.0;
  double incremental_seconds = 0.0;
  double cumulative_batch_seconds = 0.0;
  double cumulative_incremental_seconds = 0.0;
  std::size_t weight_recomputations = 0;
  std::size_t batch_weight_computations = 0;
  std::size_t bound_violations = 0;
};

struct TimingTable {
  std::size_t chunk = 0;
  std::size_t init_size = 0;
  std::vector<TimingChunk> chunks;
};

/// Streams a seeded arrival order (two samples per class seed the state) and,
/// per arrival, times the incremental update against a from-scratch S_b.
/// Eigen-solves are not timed. Samples past the last full chunk are streamed
/// but not reported.
TimingTable timing_benchmark(const LabeledDataset& ds, std::size_t chunk, std::uint64_t seed);

/// Upper bound on local-mean recomputations for an arrival into a class of
/// size `class_size` (after the arrival) with `classes` classes and `n`
/// samples in total.
std::size_t recomputation_bound(std::size_t class_size, std::size_t classes, std::size_t n);

struct OracleCheck {
  std::size_t arrivals = 0;
  std::size_t new_class_arrivals = 0;
  std::size_t checks = 0;
  double max_between_gap = 0.0;
  double max_within_gap = 0.0;
};

/// Streams `ds` in a seeded order starting from two samples of two classes,
/// so later classes open mid-stream, and compares the materialized scatters
/// with batch NWFE on the samples seen so far (dataset order, classes with a
/// single sample contributing no within-class scatter). Checks every
/// `check_every` arrivals (0: only at the end) and always at the end.
OracleCheck verify_against_batch(const LabeledDataset& ds, std::uint64_t seed, std::size_t check_every = 0);

}  // namespace nwfe
