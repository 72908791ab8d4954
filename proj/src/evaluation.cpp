#include "nwfe/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

#include "nwfe/classifier.hpp"
#include "nwfe/error.hpp"
#include "nwfe/fit.hpp"
#include "nwfe/log.hpp"
#include "nwfe/random.hpp"

namespace nwfe {

std::string_view to_string(Mode mode) { return mode == Mode::Batch ? "batch" : "incremental"; }

Mode parse_mode(std::string_view text) {
  if (text == "batch") return Mode::Batch;
  if (text == "incremental") return Mode::Incremental;
  throw Error(ErrorKind::InvalidArgument, "mode must be 'batch' or 'incremental', got '" + std::string(text) + "'");
}

std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& ds, std::size_t folds,
                                                       std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "need at least two folds");
  Rng rng(seed);
  std::vector<std::size_t> order;
  order.reserve(ds.size());
  for (std::size_t c = 0; c < ds.num_classes(); ++c) {
    const auto m = ds.members(static_cast<int>(c));
    std::vector<std::size_t> members(m.begin(), m.end());
    rng.shuffle(std::span(members));
    order.insert(order.end(), members.begin(), members.end());
  }
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t t = 0; t < order.size(); ++t) out[t % folds].push_back(order[t]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

StreamPlan plan_stream(const LabeledDataset& train, double init_fraction, std::uint64_t seed) {
  if (!(init_fraction > 0.0 && init_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "init fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  StreamPlan plan;
  for (std::size_t c = 0; c < train.num_classes(); ++c) {
    const auto m = train.members(static_cast<int>(c));
    if (m.size() < 2) {
      throw Error(ErrorKind::ClassMissingFromFold,
                  "class '" + train.label_names()[c] + "' has fewer than two training samples");
    }
    std::vector<std::size_t> members(m.begin(), m.end());
    rng.shuffle(std::span(members));
    const auto wanted = static_cast<std::size_t>(std::llround(init_fraction * static_cast<double>(m.size())));
    const std::size_t take = std::clamp<std::size_t>(wanted, 2, m.size());
    plan.init.insert(plan.init.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    plan.arrivals.insert(plan.arrivals.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
  }
  std::sort(plan.init.begin(), plan.init.end());
  std::sort(plan.arrivals.begin(), plan.arrivals.end());
  rng.shuffle(std::span(plan.arrivals));
  return plan;
}

IncrementalState run_stream(const LabeledDataset& train, const StreamPlan& plan) {
  IncrementalState state(train.subset(plan.init));
  for (auto a : plan.arrivals) {
    state.add_sample(train.sample(a), train.label(a), train.label_names()[static_cast<std::size_t>(train.label(a))]);
  }
  return state;
}

namespace {

double score(const Extractor& ex, const Matrix& train_x, std::vector<int> train_y, const LabeledDataset& test) {
  const NnModel model(project(ex, train_x), std::move(train_y));
  return accuracy(model, project(ex, test.matrix()), test.labels());
}

}  // namespace

double evaluate_state(const IncrementalState& state, const LabeledDataset& test, std::size_t dim) {
  const auto ex = extract(state.materialize(), dim, state.class_names());
  const auto seen = state.dataset();
  std::vector<int> labels;
  labels.reserve(seen.size());
  for (auto c : seen.labels()) labels.push_back(state.class_label(c));
  return score(ex, seen.matrix(), std::move(labels), test);
}

double evaluate_batch(const LabeledDataset& train, const LabeledDataset& test, std::size_t dim) {
  const auto fit = fit_batch(train, dim);
  return score(fit.extractor, train.matrix(), {train.labels().begin(), train.labels().end()}, test);
}

Interval confidence_interval(std::span<const double> rates, std::optional<std::size_t> count) {
  if (rates.empty()) throw Error(ErrorKind::InvalidArgument, "confidence interval of no rates");
  const double n = static_cast<double>(rates.size());
  const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : rates) ss += (r - mean) * (r - mean);
  // Equal rates give exactly zero spread, whatever the rounding of the mean.
  const bool constant = std::adjacent_find(rates.begin(), rates.end(), std::not_equal_to<>()) == rates.end();
  const double sd = rates.size() > 1 && !constant ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double k = static_cast<double>(count.value_or(rates.size()));
  return {mean, sd / std::sqrt(k)};
}

namespace {

FoldResult run_fold(const LabeledDataset& ds, const std::vector<std::vector<std::size_t>>& folds, std::size_t f,
                    const CvOptions& opts) {
  std::vector<std::size_t> train_rows;
  for (std::size_t g = 0; g < folds.size(); ++g) {
    if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(train_rows.begin(), train_rows.end());

  std::vector<std::size_t> per_class(ds.num_classes(), 0);
  for (auto r : train_rows) ++per_class[static_cast<std::size_t>(ds.label(r))];
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    if (per_class[c] < 2) {
      throw Error(ErrorKind::ClassMissingFromFold, "fold " + std::to_string(f) + ": class '" +
                                                       ds.label_names()[c] + "' has " +
                                                       std::to_string(per_class[c]) + " training samples");
    }
  }
  const auto train = ds.subset(train_rows);
  const auto test = ds.subset(folds[f]);

  FoldResult out;
  out.fold = f;
  out.train_size = train.size();
  out.test_size = test.size();

  if (opts.mode == Mode::Batch) {
    out.accuracy = evaluate_batch(train, test, opts.dim);
    out.init_size = train.size();
    return out;
  }

  const auto plan = plan_stream(train, opts.init_fraction, mix_seed(opts.seed, 1 + f));
  const auto state = run_stream(train, plan);
  out.init_size = plan.init.size();
  out.arrivals = plan.arrivals.size();
  out.accuracy = evaluate_state(state, test, opts.dim);

  if (opts.check_convergence) {
    const auto streamed = state.materialize();
    const auto batch = batch_scatters(train);
    out.between_gap = relative_frobenius_gap(streamed.between, batch.between);
    out.within_gap = relative_frobenius_gap(streamed.within, batch.within);
    out.batch_accuracy = evaluate_batch(train, test, opts.dim);
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

CvReport tenfold_cv(const LabeledDataset& ds, const CvOptions& opts) {
  if (ds.size() < 2 * opts.folds) {
    throw Error(ErrorKind::InvalidArgument, "cross-validation needs at least " + std::to_string(2 * opts.folds) +
                                                " samples, got " + std::to_string(ds.size()));
  }
  if (opts.dim < 1 || opts.dim > ds.dim()) {
    throw Error(ErrorKind::InvalidArgument,
                "dimension " + std::to_string(opts.dim) + " outside 1.." + std::to_string(ds.dim()));
  }
  const auto folds = stratified_folds(ds, opts.folds, mix_seed(opts.seed, 0));

  CvReport report;
  report.mode = opts.mode;
  report.dim = opts.dim;
  report.seed = opts.seed;
  report.init_fraction = opts.mode == Mode::Incremental ? opts.init_fraction : 1.0;
  report.folds.resize(opts.folds);
  parallel_for(opts.folds, opts.jobs, [&](std::size_t f) { report.folds[f] = run_fold(ds, folds, f, opts); });

  std::vector<double> rates;
  for (const auto& f : report.folds) rates.push_back(f.accuracy);
  const auto ci = confidence_interval(rates, opts.folds);
  report.mean = ci.mean;
  report.half_width = ci.half_width;
  logger().info("{} cv d={}: mean {:.4f} +- {:.4f}", to_string(opts.mode), opts.dim, ci.mean, ci.half_width);
  return report;
}

SweepReport dimension_sweep(const LabeledDataset& ds, CvOptions base) {
  SweepReport out;
  const std::size_t top = std::min<std::size_t>(ds.dim(), 15);
  for (std::size_t d = 1; d <= top; ++d) {
    base.dim = d;
    out.reports.push_back(tenfold_cv(ds, base));
    // Strict comparison keeps the smallest dimension among equal means.
    if (out.best_dim == 0 || out.reports.back().mean > out.best_mean) {
      out.best_dim = d;
      out.best_mean = out.reports.back().mean;
    }
  }
  return out;
}

LearningCurve learning_curve(const LabeledDataset& ds, std::size_t dim, std::uint64_t seed, std::size_t stride,
                             double init_fraction) {
  if (stride == 0) throw Error(ErrorKind::InvalidArgument, "checkpoint stride must be >= 1");
  const auto folds = stratified_folds(ds, 10, mix_seed(seed, 0));
  std::vector<std::size_t> train_rows;
  for (std::size_t g = 1; g < folds.size(); ++g) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
  std::sort(train_rows.begin(), train_rows.end());
  const auto train = ds.subset(train_rows);
  const auto test = ds.subset(folds[0]);
  const auto plan = plan_stream(train, init_fraction, mix_seed(seed, 1));

  LearningCurve curve;
  curve.dim = dim;
  curve.test_size = test.size();
  curve.init_size = plan.init.size();

  IncrementalState state(train.subset(plan.init));
  for (std::size_t k = 0; k < plan.arrivals.size(); ++k) {
    const auto a = plan.arrivals[k];
    state.add_sample(train.sample(a), train.label(a));
    const bool last = k + 1 == plan.arrivals.size();
    if ((k + 1) % stride == 0 || last) {
      curve.checkpoints.push_back({state.size(), evaluate_state(state, test, dim)});
    }
  }
  if (plan.arrivals.empty()) curve.checkpoints.push_back({state.size(), evaluate_state(state, test, dim)});

  const auto batch = batch_scatters(train);
  const auto streamed = state.materialize();
  curve.final_between_gap = relative_frobenius_gap(streamed.between, batch.between);
  curve.final_within_gap = relative_frobenius_gap(streamed.within, batch.within);
  curve.batch_accuracy = evaluate_batch(train, test, dim);
  return curve;
}

std::size_t recomputation_bound(std::size_t class_size, std::size_t classes, std::size_t n) {
  return class_size * classes + n;
}

TimingTable timing_benchmark(const LabeledDataset& ds, std::size_t chunk, std::uint64_t seed) {
  if (chunk == 0) throw Error(ErrorKind::InvalidArgument, "chunk size must be >= 1");
  if (ds.size() < 2 * chunk) {
    throw Error(ErrorKind::InvalidArgument, "benchmark needs at least two chunks of samples");
  }
  Rng rng(seed);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));

  // Seed with the first two samples of each class in arrival order.
  std::vector<std::size_t> taken(ds.num_classes(), 0);
  std::vector<std::size_t> init, arrivals;
  for (auto a : order) {
    auto& t = taken[static_cast<std::size_t>(ds.label(a))];
    if (t < 2) {
      init.push_back(a);
      ++t;
    } else {
      arrivals.push_back(a);
    }
  }
  for (std::size_t c = 0; c < taken.size(); ++c) {
    if (taken[c] < 2) throw Error(ErrorKind::InvalidArgument, "every class needs two samples to seed the benchmark");
  }

  TimingTable table;
  table.chunk = chunk;
  table.init_size = init.size();

  std::vector<Vector> xs;
  std::vector<int> ys;
  for (auto a : init) {
    xs.push_back(ds.sample(a));
    ys.push_back(ds.label(a));
  }
  IncrementalState state(LabeledDataset(xs, ys, ds.label_names()));

  using Clock = std::chrono::steady_clock;
  TimingChunk current;
  double cum_batch = 0.0, cum_inc = 0.0;
  for (auto a : arrivals) {
    const auto report = state.add_sample(ds.sample(a), ds.label(a));
    xs.push_back(ds.sample(a));
    ys.push_back(ds.label(a));
    const LabeledDataset seen(xs, ys, ds.label_names());

    const auto start = Clock::now();
    const Matrix sb = batch_between_scatter(seen);
    const double batch_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    (void)sb;

    const std::size_t n = state.size();
    const std::size_t class_size = state.members(report.class_id).size();
    ++current.arrivals;
    current.batch_seconds += batch_seconds;
    current.incremental_seconds += report.seconds;
    current.weight_recomputations += report.weight_recomputations;
    current.batch_weight_computations += n * state.num_classes();
    if (report.weight_recomputations > recomputation_bound(class_size, state.num_classes(), n)) {
      ++current.bound_violations;
    }
    cum_batch += batch_seconds;
    cum_inc += report.seconds;

    if (n % chunk == 0) {
      current.samples_seen = n;
      current.cumulative_batch_seconds = cum_batch;
      current.cumulative_incremental_seconds = cum_inc;
      table.chunks.push_back(current);
      current = {};
    }
  }
  return table;
}

OracleCheck verify_against_batch(const LabeledDataset& ds, std::uint64_t seed, std::size_t check_every) {
  Rng rng(seed);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));

  // Two samples each from the first two classes (in arrival order) that have
  // at least two samples; every other class opens mid-stream.
  std::vector<int> seed_classes;
  for (auto a : order) {
    const int c = ds.label(a);
    if (ds.members(c).size() >= 2 && std::find(seed_classes.begin(), seed_classes.end(), c) == seed_classes.end()) {
      seed_classes.push_back(c);
      if (seed_classes.size() == 2) break;
    }
  }
  if (seed_classes.size() < 2) {
    throw Error(ErrorKind::FewerThanTwoClasses, "need two classes with at least two samples");
  }
  std::vector<std::size_t> init, arrivals;
  std::vector<std::size_t> taken(ds.num_classes(), 0);
  for (auto a : order) {
    const int c = ds.label(a);
    const bool seeding = c == seed_classes[0] || c == seed_classes[1];
    if (seeding && taken[static_cast<std::size_t>(c)] < 2) {
      init.push_back(a);
      ++taken[static_cast<std::size_t>(c)];
    } else {
      arrivals.push_back(a);
    }
  }

  // Initial dataset with dense ids in seeding order.
  std::vector<Vector> xs;
  std::vector<int> ys;
  for (auto a : init) {
    xs.push_back(ds.sample(a));
    ys.push_back(ds.label(a) == seed_classes[0] ? 0 : 1);
  }
  const auto name = [&](int c) { return ds.label_names()[static_cast<std::size_t>(c)]; };
  IncrementalState state(LabeledDataset(xs, ys, {name(seed_classes[0]), name(seed_classes[1])}));
  // External labels of the state are its init ids; map dataset labels onto them.
  std::vector<int> external(ds.num_classes(), -1);
  external[static_cast<std::size_t>(seed_classes[0])] = 0;
  external[static_cast<std::size_t>(seed_classes[1])] = 1;
  int next_label = 2;

  std::vector<std::size_t> seen(init.begin(), init.end());
  OracleCheck check;
  auto compare = [&] {
    // Reference: batch NWFE on the seen samples in dataset order, with dense
    // ids assigned by first appearance in that order.
    std::vector<std::size_t> rows = seen;
    std::sort(rows.begin(), rows.end());
    std::vector<int> remap(ds.num_classes(), -1);
    std::vector<std::string> names;
    std::vector<Vector> rx;
    std::vector<int> ry;
    for (auto r : rows) {
      auto& id = remap[static_cast<std::size_t>(ds.label(r))];
      if (id < 0) {
        id = static_cast<int>(names.size());
        names.push_back(name(ds.label(r)));
      }
      rx.push_back(ds.sample(r));
      ry.push_back(id);
    }
    const LabeledDataset reference(std::move(rx), std::move(ry), std::move(names));
    const auto batch = batch_scatters(reference, SingletonPolicy::ZeroWithin);
    const auto streamed = state.materialize();
    check.max_between_gap = std::max(check.max_between_gap, relative_frobenius_gap(streamed.between, batch.between));
    check.max_within_gap = std::max(check.max_within_gap, relative_frobenius_gap(streamed.within, batch.within));
    ++check.checks;
  };

  for (std::size_t k = 0; k < arrivals.size(); ++k) {
    const auto a = arrivals[k];
    auto& label = external[static_cast<std::size_t>(ds.label(a))];
    if (label < 0) label = next_label++;
    const auto report = state.add_sample(ds.sample(a), label, name(ds.label(a)));
    seen.push_back(a);
    ++check.arrivals;
    check.new_class_arrivals += report.kind == ArrivalCase::NewClass;
    if (check_every > 0 && (k + 1) % check_every == 0 && k + 1 != arrivals.size()) compare();
  }
  compare();
  return check;
}

}  // namespace nwfe
