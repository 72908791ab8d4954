#include <string>

#include "nwfe/error.hpp"
#include "nwfe/incremental.hpp"

// Snapshot layout (version 1):
//
//   format        "nwfe-incremental-snapshot"
//   version       1
//   dim           p
//   classes       [{"label": int, "name": str, "members": [sample, ...]}, ...]
//   samples       [[x_0 ...], ...]                      arrival order
//   means         [[null | {"mean": [...], "distance": r}, ...], ...]   [sample][class]
//   lambda        [[[...], ...], ...]                   [i][j], aligned with members(i)
//   blocks        [[[p*p row-major], ...], ...]         [i][j], unnormalised
//
// Doubles are written in shortest round-trip form, so a restored state is
// bit-identical to the one that was saved.

namespace nwfe {

namespace {

nlohmann::json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const nlohmann::json& j, std::size_t expected) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != expected) throw Error(ErrorKind::InvalidSnapshot, "vector length mismatch");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json matrix_json(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  }
  return flat;
}

Matrix matrix_from(const nlohmann::json& j, std::size_t p) {
  const auto flat = j.get<std::vector<double>>();
  if (flat.size() != p * p) throw Error(ErrorKind::InvalidSnapshot, "block size mismatch");
  Matrix m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = 0; c < p; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * p + c];
  }
  return m;
}

}  // namespace

nlohmann::json IncrementalState::snapshot() const {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < members_.size(); ++c) {
    classes.push_back({{"label", class_labels_[c]}, {"name", class_names_[c]}, {"members", members_[c]}});
  }
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& x : samples_) samples.push_back(vector_json(x));

  nlohmann::json means = nlohmann::json::array();
  for (const auto& row : means_) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& lm : row) {
      if (lm.defined) r.push_back({{"mean", vector_json(lm.mean)}, {"distance", lm.distance}});
      else r.push_back(nullptr);
    }
    means.push_back(std::move(r));
  }
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& row : blocks_) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& b : row) r.push_back(matrix_json(b));
    blocks.push_back(std::move(r));
  }
  return {
      {"format", "nwfe-incremental-snapshot"},
      {"version", 1},
      {"dim", dim_},
      {"classes", std::move(classes)},
      {"samples", std::move(samples)},
      {"means", std::move(means)},
      {"lambda", lambda_},
      {"blocks", std::move(blocks)},
  };
}

IncrementalState IncrementalState::restore(const nlohmann::json& j) {
  try {
    if (j.at("format") != "nwfe-incremental-snapshot") throw Error(ErrorKind::InvalidSnapshot, "not a snapshot");
    if (j.at("version").get<int>() != 1) throw Error(ErrorKind::InvalidSnapshot, "unsupported snapshot version");

    IncrementalState st;
    st.dim_ = j.at("dim").get<std::size_t>();
    for (const auto& x : j.at("samples")) st.samples_.push_back(vector_from(x, st.dim_));
    const std::size_t n = st.samples_.size();

    st.sample_class_.assign(n, -1);
    for (const auto& c : j.at("classes")) {
      const int cls = static_cast<int>(st.members_.size());
      st.class_labels_.push_back(c.at("label").get<int>());
      st.class_names_.push_back(c.at("name").get<std::string>());
      st.members_.push_back(c.at("members").get<std::vector<std::size_t>>());
      for (auto s : st.members_.back()) {
        if (s >= n || st.sample_class_[s] != -1) throw Error(ErrorKind::InvalidSnapshot, "bad class membership");
        st.sample_class_[s] = cls;
      }
    }
    for (int c : st.sample_class_) {
      if (c < 0) throw Error(ErrorKind::InvalidSnapshot, "sample without a class");
    }
    const std::size_t classes = st.members_.size();
    if (classes < 2) throw Error(ErrorKind::InvalidSnapshot, "snapshot holds fewer than two classes");

    const auto& means = j.at("means");
    if (means.size() != n) throw Error(ErrorKind::InvalidSnapshot, "means table size mismatch");
    for (const auto& row : means) {
      if (row.size() != classes) throw Error(ErrorKind::InvalidSnapshot, "means row size mismatch");
      std::vector<LocalMean> r(classes);
      for (std::size_t c = 0; c < classes; ++c) {
        if (row[c].is_null()) continue;
        r[c].mean = vector_from(row[c].at("mean"), st.dim_);
        r[c].distance = row[c].at("distance").get<double>();
        r[c].defined = true;
      }
      st.means_.push_back(std::move(r));
    }

    st.lambda_ = j.at("lambda").get<std::vector<std::vector<std::vector<double>>>>();
    if (st.lambda_.size() != classes) throw Error(ErrorKind::InvalidSnapshot, "lambda table size mismatch");
    for (const auto& row : j.at("blocks")) {
      std::vector<Matrix> r;
      for (const auto& b : row) r.push_back(matrix_from(b, st.dim_));
      if (r.size() != classes) throw Error(ErrorKind::InvalidSnapshot, "block row size mismatch");
      st.blocks_.push_back(std::move(r));
    }
    if (st.blocks_.size() != classes) throw Error(ErrorKind::InvalidSnapshot, "block table size mismatch");

    st.dist_ = pairwise_distances(st.samples_);
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSnapshot, e.what());
  }
}

}  // namespace nwfe
