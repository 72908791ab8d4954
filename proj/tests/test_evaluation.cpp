#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "nwfe/dataset.hpp"
#include "nwfe/evaluation.hpp"
#include "nwfe/report.hpp"
#include "nwfe/synth.hpp"
#include "test_util.hpp"

using namespace nwfe;
using testing::error_kind;

TEST_CASE("confidence interval") {
  SUBCASE("equal rates have zero half-width") {
    const std::vector<double> r(10, 0.9);
    const auto ci = confidence_interval(r);
    CHECK(ci.mean == doctest::Approx(0.9));
    CHECK(ci.half_width == 0.0);
  }
  SUBCASE("rates {0, 1} give mean 0.5 and half-width 0.5") {
    const std::vector<double> r{0.0, 1.0};
    const auto ci = confidence_interval(r);
    CHECK(ci.mean == 0.5);
    CHECK(ci.half_width == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("hand computation on ten rates") {
    const std::vector<double> r{1.0, 1.0, 0.9333333333333333, 1.0, 0.9333333333333333,
                                1.0, 1.0, 1.0, 0.9333333333333333, 1.0};
    // mean 0.98, sample sd 0.0322031 (three values 0.0466667 below, seven 0.02 above).
    const double sd = std::sqrt((3 * std::pow(0.98 - 0.9333333333333333, 2) + 7 * std::pow(0.02, 2)) / 9.0);
    const auto ci = confidence_interval(r, 10);
    CHECK(ci.mean == doctest::Approx(0.98));
    CHECK(ci.half_width == doctest::Approx(sd / std::sqrt(10.0)));
  }
  SUBCASE("empty input") {
    CHECK(error_kind([] { confidence_interval(std::vector<double>{}); }) == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("stratified folds") {
  const auto ds = load_csv(NWFE_DATA_DIR "/iris.csv");
  const auto a = stratified_folds(ds, 10, 5);
  const auto b = stratified_folds(ds, 10, 5);
  CHECK(a == b);
  CHECK(a != stratified_folds(ds, 10, 6));
  std::set<std::size_t> seen;
  for (const auto& fold : a) {
    CHECK(fold.size() == 15);
    std::vector<std::size_t> per_class(3, 0);
    for (auto row : fold) {
      CHECK(seen.insert(row).second);
      ++per_class[static_cast<std::size_t>(ds.label(row))];
    }
    CHECK(per_class == std::vector<std::size_t>{5, 5, 5});
  }
  CHECK(seen.size() == 150);
}

TEST_CASE("stream plan") {
  const auto ds = random_labeled_dataset(47, 3, 2, 2);
  const auto plan = plan_stream(ds, 0.2, 11);
  CHECK(plan.init.size() + plan.arrivals.size() == 47);
  CHECK(std::is_sorted(plan.init.begin(), plan.init.end()));
  std::vector<std::size_t> in_init(3, 0);
  for (auto row : plan.init) ++in_init[static_cast<std::size_t>(ds.label(row))];
  // Class sizes 16, 16, 15: round(3.2) = 3 and round(3.0) = 3.
  CHECK(in_init == std::vector<std::size_t>{3, 3, 3});
  const auto again = plan_stream(ds, 0.2, 11);
  CHECK(again.arrivals == plan.arrivals);

  SUBCASE("small classes still get two initial samples") {
    const auto tiny = random_labeled_dataset(9, 3, 2, 4);
    for (const auto& row : plan_stream(tiny, 0.2, 1).init) CHECK(row < 9);
    CHECK(plan_stream(tiny, 0.2, 1).init.size() == 6);
  }
  SUBCASE("a class with one training sample") {
    const LabeledDataset bad({Vector::Zero(1), Vector::Ones(1), Vector::Ones(1) * 2}, {0, 0, 1});
    CHECK(error_kind([&] { plan_stream(bad, 0.2, 1); }) == ErrorKind::ClassMissingFromFold);
  }
}

TEST_CASE("ten-fold CV is deterministic and independent of the worker count") {
  const auto ds = random_labeled_dataset(80, 3, 4, 9);
  CvOptions opts;
  opts.dim = 2;
  opts.seed = 3;
  const auto a = tenfold_cv(ds, opts);
  opts.jobs = 4;
  const auto b = tenfold_cv(ds, opts);
  REQUIRE(a.folds.size() == 10);
  for (std::size_t f = 0; f < 10; ++f) CHECK(a.folds[f].accuracy == b.folds[f].accuracy);
  CHECK(a.mean == b.mean);
  std::vector<double> rates;
  for (const auto& f : a.folds) {
    rates.push_back(f.accuracy);
    CHECK(f.accuracy >= 0.0);
    CHECK(f.accuracy <= 1.0);
  }
  CHECK(a.half_width == confidence_interval(rates, 10).half_width);
}

TEST_CASE("incremental CV ends each fold on the batch scatters") {
  const auto ds = random_labeled_dataset(100, 3, 4, 19);
  CvOptions opts;
  opts.dim = 3;
  opts.mode = Mode::Incremental;
  opts.seed = 12;
  opts.check_convergence = true;
  const auto r = tenfold_cv(ds, opts);
  for (const auto& f : r.folds) {
    REQUIRE(f.between_gap.has_value());
    CHECK(*f.between_gap <= 1e-9);
    CHECK(*f.within_gap <= 1e-9);
    CHECK(f.init_size + f.arrivals == f.train_size);
    CHECK(f.accuracy == *f.batch_accuracy);
  }
}

TEST_CASE("CV input checks") {
  const auto ds = random_labeled_dataset(15, 3, 2, 1);
  CvOptions opts;
  CHECK(error_kind([&] { tenfold_cv(ds, opts); }) == ErrorKind::InvalidArgument);
  const auto big = random_labeled_dataset(40, 2, 2, 1);
  opts.dim = 3;
  CHECK(error_kind([&] { tenfold_cv(big, opts); }) == ErrorKind::InvalidArgument);
  // Two samples of a rare class: the split that holds one out trains on one.
  std::vector<Vector> xs;
  std::vector<int> ys;
  for (int k = 0; k < 40; ++k) {
    xs.push_back(Vector::Constant(2, k));
    ys.push_back(k < 38 ? 0 : 1);
  }
  opts.dim = 1;
  CHECK(error_kind([&] { tenfold_cv(LabeledDataset(xs, ys), opts); }) == ErrorKind::ClassMissingFromFold);
  opts.mode = Mode::Incremental;
  CHECK(error_kind([&] { tenfold_cv(LabeledDataset(xs, ys), opts); }) == ErrorKind::ClassMissingFromFold);
}

TEST_CASE("test folds may miss a class") {
  const auto base = random_labeled_dataset(40, 2, 2, 6);
  std::vector<Vector> xs(base.samples().begin(), base.samples().end());
  std::vector<int> ys;
  for (int k = 0; k < 40; ++k) ys.push_back(k < 37 ? 0 : 1);
  CvOptions opts;
  opts.dim = 2;
  opts.seed = 5;
  const auto r = tenfold_cv(LabeledDataset(xs, ys), opts);
  CHECK(r.folds.size() == 10);
}

TEST_CASE("dimension sweep") {
  const auto iris = load_csv(NWFE_DATA_DIR "/iris.csv");
  CvOptions opts;
  opts.seed = 1;
  const auto s = dimension_sweep(iris, opts);
  REQUIRE(s.reports.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(s.reports[k].dim == k + 1);
  CHECK(s.best_mean >= s.reports[0].mean);
  CHECK(s.best_mean == s.reports[s.best_dim - 1].mean);

  const auto wide = random_labeled_dataset(60, 2, 20, 3);
  CHECK(dimension_sweep(wide, opts).reports.size() == 15);
}

TEST_CASE("learning curve") {
  SUBCASE("stride 1 gives one checkpoint per arrival") {
    const auto ds = random_labeled_dataset(48, 2, 3, 14);
    const auto c = learning_curve(ds, 2, 5, 1);
    const std::size_t train = 48 - c.test_size;
    REQUIRE(c.checkpoints.size() == train - c.init_size);
    for (std::size_t k = 1; k < c.checkpoints.size(); ++k) {
      CHECK(c.checkpoints[k].samples_seen == c.checkpoints[k - 1].samples_seen + 1);
    }
    CHECK(c.checkpoints.back().samples_seen == train);
  }
  SUBCASE("final point equals the batch-trained accuracy") {
    const auto iris = load_csv(NWFE_DATA_DIR "/iris.csv");
    const auto c = learning_curve(iris, 4, 2, 10);
    CHECK(c.final_between_gap <= 1e-9);
    CHECK(c.final_within_gap <= 1e-9);
    CHECK(c.checkpoints.back().accuracy == c.batch_accuracy);
    CHECK(c.checkpoints.back().samples_seen == 135);
  }
  SUBCASE("trend on the shipped Gaussian setup is upward") {
    const auto ds = generate(load_synth_spec(NWFE_DATA_DIR "/gaussian.json"));
    const auto c = learning_curve(ds, 5, 1, 5);
    const std::size_t q = c.checkpoints.size() / 4;
    REQUIRE(q > 0);
    double first = 0.0, last = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
      first += c.checkpoints[k].accuracy;
      last += c.checkpoints[c.checkpoints.size() - 1 - k].accuracy;
    }
    CHECK(last >= first);
  }
}

TEST_CASE("timing benchmark counters") {
  const auto ds = random_labeled_dataset(260, 4, 5, 33);
  const auto t = timing_benchmark(ds, 100, 2);
  CHECK(t.init_size == 8);
  REQUIRE(t.chunks.size() == 2);
  CHECK(t.chunks[0].samples_seen == 100);
  CHECK(t.chunks[1].samples_seen == 200);
  CHECK(t.chunks[0].arrivals == 92);
  CHECK(t.chunks[1].arrivals == 100);
  for (const auto& c : t.chunks) {
    CHECK(c.bound_violations == 0);
    CHECK(c.weight_recomputations < c.batch_weight_computations);
    CHECK(c.cumulative_batch_seconds >= c.batch_seconds);
  }
  CHECK(t.chunks[1].cumulative_incremental_seconds ==
        doctest::Approx(t.chunks[0].incremental_seconds + t.chunks[1].incremental_seconds));
  CHECK(recomputation_bound(10, 3, 40) == 70);
}

TEST_CASE("streaming verification against batch") {
  const auto ds = random_labeled_dataset(120, 3, 5, 9);
  const auto r = verify_against_batch(ds, 9, 10);
  CHECK(r.arrivals == 116);
  CHECK(r.new_class_arrivals == 1);
  CHECK(r.checks >= 11);
  CHECK(r.max_between_gap <= 1e-9);
  CHECK(r.max_within_gap <= 1e-9);
}

TEST_CASE("reports serialize") {
  const auto ds = random_labeled_dataset(40, 2, 3, 1);
  CvOptions opts;
  opts.dim = 2;
  opts.seed = 4;
  const auto r = tenfold_cv(ds, opts);
  const auto j = to_json(r);
  CHECK(j.at("folds").size() == 10);
  CHECK(j.at("mode") == "batch");
  std::ostringstream csv;
  write_csv(r, csv);
  const auto text = csv.str();
  CHECK(text.rfind("mode,dim,seed,fold,accuracy", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);
}

TEST_CASE("mode names") {
  CHECK(parse_mode("batch") == Mode::Batch);
  CHECK(parse_mode("incremental") == Mode::Incremental);
  CHECK(to_string(Mode::Incremental) == "incremental");
  CHECK(error_kind([] { parse_mode("online"); }) == ErrorKind::InvalidArgument);
}
