#include <doctest.h>

#include <numeric>

#include "nwfe/dataset.hpp"
#include "nwfe/evaluation.hpp"
#include "nwfe/fit.hpp"
#include "nwfe/incremental.hpp"
#include "nwfe/random.hpp"
#include "nwfe/scatter.hpp"
#include "nwfe/synth.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace nwfe;
using testing::error_kind;

namespace {

ScatterPair reference(const IncrementalState& state) {
  return batch_scatters(state.dataset(), SingletonPolicy::ZeroWithin);
}

void check_matches_batch(const IncrementalState& state, double tol) {
  const auto got = state.materialize();
  const auto want = reference(state);
  CHECK(relative_frobenius_gap(got.between, want.between) <= tol);
  CHECK(relative_frobenius_gap(got.within, want.within) <= tol);
}

std::vector<std::vector<Matrix>> all_blocks(const IncrementalState& s) {
  const int k = static_cast<int>(s.num_classes());
  std::vector<std::vector<Matrix>> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(i)].push_back(s.block(i, j));
  }
  return out;
}

bool bit_identical(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && std::equal(a.data(), a.data() + a.size(), b.data());
}

/// First `per_class` samples of every class in dataset order form the seed; the
/// rest are returned in a seeded shuffled order.
std::pair<LabeledDataset, std::vector<std::size_t>> split_seed(const LabeledDataset& ds, std::size_t per_class,
                                                               std::uint64_t seed) {
  std::vector<std::size_t> init, rest;
  for (int c = 0; c < static_cast<int>(ds.num_classes()); ++c) {
    const auto m = ds.members(c);
    for (std::size_t k = 0; k < m.size(); ++k) (k < per_class ? init : rest).push_back(m[k]);
  }
  std::sort(init.begin(), init.end());
  Rng rng(seed);
  rng.shuffle(std::span(rest));
  return {ds.subset(init), rest};
}

}  // namespace

TEST_CASE("init equals batch") {
  SUBCASE("full iris to 1e-12") {
    const auto ds = load_csv(NWFE_DATA_DIR "/iris.csv");
    const IncrementalState state(ds);
    const auto got = state.materialize();
    const auto want = fit_batch(ds, 4).scatters;
    CHECK(relative_frobenius_gap(got.between, want.between) <= 1e-12);
    CHECK(relative_frobenius_gap(got.within, want.within) <= 1e-12);
  }
  SUBCASE("two classes of two samples is a valid minimal state") {
    const auto ds = random_labeled_dataset(4, 2, 3, 6);
    const IncrementalState state(ds);
    CHECK(state.num_classes() == 2);
    CHECK(!state.within_pending(0));
    CHECK(!state.within_pending(1));
    check_matches_batch(state, 1e-12);
  }
  SUBCASE("a single class is rejected") {
    const auto ds = LabeledDataset({Vector::Zero(2), Vector::Ones(2)}, {0, 0});
    CHECK(error_kind([&] { IncrementalState{ds}; }) == ErrorKind::FewerThanTwoClasses);
  }
}

TEST_CASE("add_sample dispatch and input checks") {
  const auto ds = random_labeled_dataset(8, 2, 3, 2);
  IncrementalState state(ds);
  CHECK(state.add_sample(Vector::Ones(3), 1).kind == ArrivalCase::ExistingClass);
  const auto r = state.add_sample(Vector::Zero(3), 7, "seven");
  CHECK(r.kind == ArrivalCase::NewClass);
  CHECK(state.num_classes() == 3);
  CHECK(state.class_names()[2] == "seven");
  CHECK(state.class_of_label(7) == 2);
  CHECK(error_kind([&] { state.add_sample(Vector::Zero(4), 0); }) == ErrorKind::DimensionMismatch);
  Vector bad = Vector::Zero(3);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK(error_kind([&] { state.add_sample(bad, 0); }) == ErrorKind::InvalidArgument);
  CHECK(state.size() == 10);
}

TEST_CASE("iris streamed one sample at a time from a 30-sample init matches batch on all 150") {
  const auto ds = load_csv(NWFE_DATA_DIR "/iris.csv");
  auto [init, rest] = split_seed(ds, 10, 4);
  IncrementalState state(init);
  for (auto row : rest) state.add_sample(ds.sample(row), ds.label(row));
  REQUIRE(state.size() == 150);
  const auto got = state.materialize();
  const auto want = batch_scatters(ds);
  CHECK(relative_frobenius_gap(got.between, want.between) <= 1e-9);
  CHECK(relative_frobenius_gap(got.within, want.within) <= 1e-9);
}

TEST_CASE("duplicate of an existing member engages the zero-distance rule") {
  const auto ds = random_labeled_dataset(20, 3, 4, 13);
  IncrementalState state(ds);
  const std::size_t copy_of = ds.members(1)[2];
  state.add_sample(ds.sample(copy_of), 1);
  const std::size_t y = state.size() - 1;
  CHECK(state.local_mean(y, 1).distance == 0.0);
  CHECK(state.local_mean(copy_of, 1).distance == 0.0);
  check_matches_batch(state, 1e-9);
}

TEST_CASE("existing-class arrival leaves blocks away from E bit-identical") {
  const auto ds = random_labeled_dataset(40, 4, 5, 17);
  IncrementalState state(ds);
  Rng rng(1);
  for (int step = 0; step < 12; ++step) {
    const int e = static_cast<int>(rng.below(4));
    Vector y(5);
    for (Eigen::Index d = 0; d < 5; ++d) y[d] = rng.normal();
    const auto before = all_blocks(state);
    const auto report = state.add_sample(y, e);
    const auto after = all_blocks(state);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const bool touched = (i == e || j == e);
        const bool listed = std::find(report.recomputed_blocks.begin(), report.recomputed_blocks.end(),
                                      BlockId{i, j}) != report.recomputed_blocks.end();
        CHECK(touched == listed);
        if (!touched) CHECK(bit_identical(before[i][j], after[i][j]));
      }
    }
  }
  check_matches_batch(state, 1e-9);
}

TEST_CASE("new-class arrival") {
  const auto ds = random_labeled_dataset(16, 2, 3, 23);
  IncrementalState state(ds);
  const auto before = all_blocks(state);
  const auto old_within = state.materialize().within;
  const double n_before = static_cast<double>(state.size());

  Vector y(3);
  y << 0.25, -1.5, 2.0;
  const auto report = state.add_sample(y, 9);
  CHECK(report.kind == ArrivalCase::NewClass);
  CHECK(state.num_classes() == 3);
  CHECK(state.within_pending(2));

  SUBCASE("pre-existing blocks, and so the unnormalized S_w, are bit-identical") {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) CHECK(bit_identical(before[i][j], state.block(i, j)));
    }
    CHECK(state.block(2, 2).norm() == 0.0);
    const Matrix unnormalized = state.materialize().within * static_cast<double>(state.size());
    CHECK(relative_frobenius_gap(unnormalized, old_within * n_before) <= 1e-15);
    for (const auto& b : report.recomputed_blocks) CHECK((b.from == 2) != (b.to == 2));
  }
  SUBCASE("the new sample has lambda 1 against every other class") {
    for (int j = 0; j < 2; ++j) {
      REQUIRE(state.lambda(2, j).size() == 1);
      CHECK(state.lambda(2, j)[0] == 1.0);
    }
  }
  SUBCASE("every earlier sample sees the singleton as its local mean") {
    for (std::size_t s = 0; s + 1 < state.size(); ++s) CHECK(state.local_mean(s, 2).mean == y);
  }
  SUBCASE("matches batch with a zero singleton within term") {
    check_matches_batch(state, 1e-9);
  }
  SUBCASE("second sample activates the pending within block") {
    state.add_sample(y + Vector::Ones(3), 9);
    CHECK(!state.within_pending(2));
    CHECK(state.block(2, 2).norm() > 0.0);
    check_matches_batch(state, 1e-9);
  }
}

TEST_CASE("interleaved existing and new-class arrivals on a seeded stream") {
  const auto full = random_labeled_dataset(90, 5, 4, 31);
  // Seed with two samples of classes 0 and 1 only; 2, 3 and 4 open mid-stream.
  std::vector<std::size_t> init{full.members(0)[0], full.members(0)[1], full.members(1)[0], full.members(1)[1]};
  std::vector<std::size_t> rest;
  for (std::size_t a = 0; a < full.size(); ++a) {
    if (std::find(init.begin(), init.end(), a) == init.end()) rest.push_back(a);
  }
  Rng rng(8);
  rng.shuffle(std::span(rest));
  std::sort(init.begin(), init.end());
  std::vector<Vector> seed_xs;
  std::vector<int> seed_ys;
  for (auto row : init) {
    seed_xs.push_back(full.sample(row));
    seed_ys.push_back(full.label(row));
  }
  IncrementalState state(LabeledDataset(seed_xs, seed_ys));
  std::size_t opened = 0;
  for (std::size_t t = 0; t < rest.size(); ++t) {
    const auto r = state.add_sample(full.sample(rest[t]), full.label(rest[t]));
    if (r.kind == ArrivalCase::NewClass) ++opened;
    if (t % 9 == 0) check_matches_batch(state, 1e-9);
  }
  CHECK(opened == 3);
  check_matches_batch(state, 1e-9);
}

TEST_CASE("different arrival orders give the same scatters") {
  const auto ds = random_labeled_dataset(60, 3, 5, 41);
  auto [init, rest] = split_seed(ds, 2, 5);
  auto other = rest;
  std::reverse(other.begin(), other.end());
  IncrementalState a(init), b(init);
  for (auto row : rest) a.add_sample(ds.sample(row), ds.label(row));
  for (auto row : other) b.add_sample(ds.sample(row), ds.label(row));
  const auto sa = a.materialize();
  const auto sb = b.materialize();
  CHECK(relative_frobenius_gap(sa.between, sb.between) <= 1e-9);
  CHECK(relative_frobenius_gap(sa.within, sb.within) <= 1e-9);
}

TEST_CASE("local-mean recomputations stay within the counting bound") {
  const auto ds = random_labeled_dataset(200, 4, 3, 51);
  auto [init, rest] = split_seed(ds, 2, 6);
  IncrementalState state(init);
  for (auto row : rest) {
    const auto r = state.add_sample(ds.sample(row), ds.label(row));
    const int e = r.class_id;
    const std::size_t n = state.size();
    const std::size_t l = state.num_classes();
    CHECK(r.weight_recomputations <= recomputation_bound(state.members(e).size(), l, n));
    if (state.members(e).size() < n / 2) CHECK(r.weight_recomputations < n * l);
  }
}

TEST_CASE("materialize is symmetric PSD after every update") {
  const auto ds = random_labeled_dataset(50, 3, 4, 61);
  auto [init, rest] = split_seed(ds, 2, 7);
  IncrementalState state(init);
  for (auto row : rest) {
    state.add_sample(ds.sample(row), ds.label(row));
    const auto s = state.materialize();
    for (const Matrix* m : {&s.between, &s.within}) {
      CHECK((*m - m->transpose()).norm() == 0.0);
      const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(*m).eigenvalues().minCoeff();
      CHECK(lo >= -1e-10 * m->trace());
    }
  }
}

TEST_CASE("snapshot round trip") {
  const auto ds = random_labeled_dataset(30, 3, 4, 71);
  auto [init, rest] = split_seed(ds, 3, 8);
  IncrementalState state(init);
  for (std::size_t t = 0; t < 10; ++t) state.add_sample(ds.sample(rest[t]), ds.label(rest[t]));
  state.add_sample(Vector::Constant(4, 0.5), 42, "late");

  const auto text = state.snapshot().dump();
  auto restored = IncrementalState::restore(nlohmann::json::parse(text));
  CHECK(restored.size() == state.size());
  CHECK(restored.class_names() == state.class_names());
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(bit_identical(restored.block(i, j), state.block(i, j)));
  }
  // Both continue identically.
  for (std::size_t t = 10; t < rest.size(); ++t) {
    state.add_sample(ds.sample(rest[t]), ds.label(rest[t]));
    restored.add_sample(ds.sample(rest[t]), ds.label(rest[t]));
  }
  CHECK(bit_identical(restored.materialize().between, state.materialize().between));
  CHECK(bit_identical(restored.materialize().within, state.materialize().within));

  auto broken = nlohmann::json::parse(text);
  broken["version"] = 99;
  CHECK(error_kind([&] { IncrementalState::restore(broken); }) == ErrorKind::InvalidSnapshot);
  broken = nlohmann::json::parse(text);
  broken["blocks"].erase(0);
  CHECK(error_kind([&] { IncrementalState::restore(broken); }) == ErrorKind::InvalidSnapshot);
}
