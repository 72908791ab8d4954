#include <doctest.h>

#include <algorithm>
#include <complex>

#include <Eigen/Eigenvalues>

#include "nwfe/fit.hpp"
#include "nwfe/random.hpp"
#include "nwfe/scatter.hpp"
#include "nwfe/subspace.hpp"
#include "nwfe/synth.hpp"
#include "test_util.hpp"

using namespace nwfe;
using testing::error_kind;

namespace {

Matrix random_psd(Rng& rng, Eigen::Index p, Eigen::Index rank) {
  Matrix a(p, rank);
  for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = rng.normal();
  return a * a.transpose();
}

}  // namespace

TEST_CASE("identity pair gives unit eigenvalues and an orthonormal projection") {
  const auto ex = solve(Matrix::Identity(4, 4), Matrix::Identity(4, 4), 4);
  CHECK((ex.eigenvalues.array() - 1.0).abs().maxCoeff() <= 1e-14);
  CHECK((ex.projection.transpose() * ex.projection - Matrix::Identity(4, 4)).norm() <= 1e-12);
}

TEST_CASE("diag(4, 1) against identity, d = 1") {
  Matrix sb = Matrix::Zero(2, 2);
  sb(0, 0) = 4.0;
  sb(1, 1) = 1.0;
  const auto ex = solve(sb, Matrix::Identity(2, 2), 1);
  CHECK(ex.eigenvalues[0] == doctest::Approx(4.0));
  CHECK(ex.projection(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(ex.projection(1, 0)) <= 1e-14);
}

TEST_CASE("random 6x6 pairs match the eigenvalues of S_w^-1 S_b") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix sw = random_psd(rng, 6, 6) + 0.1 * Matrix::Identity(6, 6);
    const Matrix sb = random_psd(rng, 6, 1 + trial % 6);
    const auto ex = solve(sb, sw, 6);

    Eigen::EigenSolver<Matrix> general(sw.inverse() * sb);
    std::vector<double> want;
    for (Eigen::Index k = 0; k < 6; ++k) want.push_back(std::max(0.0, general.eigenvalues()[k].real()));
    std::sort(want.rbegin(), want.rend());
    const double scale = std::max(1.0, want[0]);
    for (Eigen::Index k = 0; k < 6; ++k) {
      CHECK(std::abs(ex.eigenvalues[k] - want[static_cast<std::size_t>(k)]) <= 1e-8 * scale);
    }
    // Residuals, S_w normalization, descending order, sign convention.
    for (Eigen::Index k = 0; k < 6; ++k) {
      const Vector v = ex.projection.col(k);
      CHECK((sb * v - ex.eigenvalues[k] * sw * v).norm() <= 1e-8 * sb.norm());
      CHECK(v.dot(sw * v) == doctest::Approx(1.0).epsilon(1e-10));
      Eigen::Index top = 0;
      v.cwiseAbs().maxCoeff(&top);
      CHECK(v[top] > 0.0);
      if (k > 0) CHECK(ex.eigenvalues[k - 1] >= ex.eigenvalues[k]);
    }
  }
}

TEST_CASE("solve error paths") {
  const Matrix i3 = Matrix::Identity(3, 3);
  Matrix indefinite = i3;
  indefinite(2, 2) = -1.0;
  CHECK(error_kind([&] { solve(i3, indefinite, 2); }) == ErrorKind::NotPositiveDefinite);
  CHECK(error_kind([&] { solve(i3, i3, 0); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { solve(i3, i3, 4); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { solve(Matrix::Identity(2, 2), i3, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("projection") {
  SUBCASE("identity extractor leaves input unchanged") {
    const auto ex = solve(Matrix::Identity(3, 3), Matrix::Identity(3, 3), 3);
    Matrix x(2, 3);
    x << 1, 2, 3, -4, 5, 0.5;
    CHECK((project(ex, x) - x * ex.projection).norm() == 0.0);
    Extractor plain{Matrix::Identity(3, 3), Vector::Ones(3), {}};
    CHECK(project(plain, x) == x);
  }
  SUBCASE("e_1 projection returns the first coordinate") {
    Extractor ex{Matrix::Zero(3, 1), Vector::Ones(1), {}};
    ex.projection(0, 0) = 1.0;
    Vector x(3);
    x << 7, 8, 9;
    CHECK(project(ex, x)[0] == 7.0);
  }
  SUBCASE("linearity") {
    Rng rng(4);
    const auto ex = solve(random_psd(rng, 5, 3), random_psd(rng, 5, 5) + Matrix::Identity(5, 5), 3);
    Vector x(5), t(5);
    for (Eigen::Index k = 0; k < 5; ++k) {
      x[k] = rng.normal();
      t[k] = rng.normal();
    }
    CHECK((project(ex, Vector(x + t)) - project(ex, x) - ex.projection.transpose() * t).norm() <= 1e-12);
  }
  SUBCASE("wrong input dimension") {
    const auto ex = solve(Matrix::Identity(3, 3), Matrix::Identity(3, 3), 2);
    CHECK(error_kind([&] { project(ex, Vector(Vector::Zero(4))); }) == ErrorKind::DimensionMismatch);
    CHECK(error_kind([&] { project(ex, Matrix(Matrix::Zero(2, 4))); }) == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("more than L-1 features on the shipped Gaussian setup") {
  const auto ds = generate(load_synth_spec(NWFE_DATA_DIR "/gaussian.json"));
  const auto fit = fit_batch(ds, 6);
  const double top = fit.extractor.eigenvalues[0];
  const auto above = (fit.extractor.eigenvalues.array() > 1e-6 * top).count();
  CHECK(above >= 3);
}

TEST_CASE("eigenvalues are invariant under uniform scaling of the data") {
  const auto ds = random_labeled_dataset(60, 3, 4, 8);
  const auto base = fit_batch(ds, 4).extractor.eigenvalues;
  for (double c : {0.1, 7.0}) {
    std::vector<Vector> xs;
    for (const auto& x : ds.samples()) xs.push_back(c * x);
    const LabeledDataset scaled(xs, {ds.labels().begin(), ds.labels().end()});
    const auto ev = fit_batch(scaled, 4).extractor.eigenvalues;
    CHECK((ev - base).norm() <= 1e-8 * base.norm());
  }
}

TEST_CASE("extractor JSON round trip") {
  Rng rng(12);
  auto ex = solve(random_psd(rng, 4, 4), random_psd(rng, 4, 4) + Matrix::Identity(4, 4), 2);
  ex.label_names = {"a", "b", "c"};
  const auto back = extractor_from_json(nlohmann::json::parse(to_json(ex).dump()));
  CHECK(back.projection == ex.projection);
  CHECK(back.eigenvalues == ex.eigenvalues);
  CHECK(back.label_names == ex.label_names);
  CHECK(back.input_dim() == 4);
  CHECK(back.output_dim() == 2);

  auto j = to_json(ex);
  j["projection"].erase(0);
  CHECK(error_kind([&] { extractor_from_json(j); }) == ErrorKind::InvalidArgument);
}
