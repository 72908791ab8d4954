#include "nwfe/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nwfe/error.hpp"

namespace nwfe {

namespace {

void fix_sign(Eigen::Ref<Vector> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
}

bool lexicographically_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

Extractor solve(const Matrix& between, const Matrix& within_reg, std::size_t d) {
  const auto p = between.rows();
  if (between.cols() != p || within_reg.rows() != p || within_reg.cols() != p) {
    throw Error(ErrorKind::InvalidArgument, "scatter matrices must be square and of equal size");
  }
  if (d < 1 || d > static_cast<std::size_t>(p)) {
    throw Error(ErrorKind::InvalidArgument,
                "target dimension " + std::to_string(d) + " outside 1.." + std::to_string(p));
  }

  const Eigen::LLT<Matrix> llt(within_reg);
  if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all()) {
    throw Error(ErrorKind::NotPositiveDefinite, "regularized within-class scatter has no Cholesky factor");
  }
  const auto lower = llt.matrixL();

  // C = L^-1 S_b L^-T, symmetric by construction up to rounding.
  const Matrix half = lower.solve(between);
  Matrix whitened = lower.solve(half.transpose());
  whitened = 0.5 * (whitened + whitened.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(whitened);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "symmetric eigensolver did not converge");
  }

  // Back-transform v = L^-T u.
  Matrix vectors = lower.transpose().solve(eig.eigenvectors());
  // S_b is PSD; negative values are rounding noise.
  const Vector values = eig.eigenvalues().cwiseMax(0.0);
  for (Eigen::Index k = 0; k < p; ++k) fix_sign(vectors.col(k));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] > values[b]; });

  // Near-equal eigenvalues are ordered by their sign-fixed vectors. The
  // reported values stay in descending order, so within a group a value may
  // pair with a vector from the same group; they differ by at most `tie`.
  const double tie = 1e-12 * std::max(1.0, values.maxCoeff());
  std::vector<double> sorted_values(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) sorted_values[k] = values[order[k]];
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[start]] - values[order[end]] <= tie) ++end;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end),
              [&](auto a, auto b) { return lexicographically_less(vectors.col(a), vectors.col(b)); });
    start = end;
  }

  Extractor ex;
  ex.projection.resize(p, static_cast<Eigen::Index>(d));
  ex.eigenvalues.resize(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) {
    const auto src = order[k];
    ex.projection.col(static_cast<Eigen::Index>(k)) = vectors.col(src);
    ex.eigenvalues[static_cast<Eigen::Index>(k)] = sorted_values[k];
  }
  return ex;
}

Matrix project(const Extractor& ex, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != ex.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.cols()) +
                                                  " features, extractor expects " + std::to_string(ex.input_dim()));
  }
  return x * ex.projection;
}

Vector project(const Extractor& ex, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != ex.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                  " features, extractor expects " + std::to_string(ex.input_dim()));
  }
  return ex.projection.transpose() * x;
}

nlohmann::json to_json(const Extractor& ex) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(ex.projection.size()));
  for (Eigen::Index r = 0; r < ex.projection.rows(); ++r) {
    for (Eigen::Index c = 0; c < ex.projection.cols(); ++c) flat.push_back(ex.projection(r, c));
  }
  return {
      {"format", "nwfe-extractor"},
      {"version", 1},
      {"p", ex.input_dim()},
      {"d", ex.output_dim()},
      {"projection", flat},
      {"eigenvalues", std::vector<double>(ex.eigenvalues.data(), ex.eigenvalues.data() + ex.eigenvalues.size())},
      {"labels", ex.label_names},
  };
}

Extractor extractor_from_json(const nlohmann::json& j) {
  try {
    const auto p = j.at("p").get<std::size_t>();
    const auto d = j.at("d").get<std::size_t>();
    const auto flat = j.at("projection").get<std::vector<double>>();
    const auto values = j.at("eigenvalues").get<std::vector<double>>();
    if (flat.size() != p * d || values.size() != d) {
      throw Error(ErrorKind::InvalidArgument, "extractor JSON sizes do not match p and d");
    }
    Extractor ex;
    ex.projection.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        ex.projection(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * d + c];
      }
    }
    ex.eigenvalues = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(d));
    ex.label_names = j.value("labels", std::vector<std::string>{});
    return ex;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed extractor JSON: ") + e.what());
  }
}

}  // namespace nwfe
