#include "nwfe/classifier.hpp"

#include <limits>

#include "nwfe/error.hpp"

namespace nwfe {

NnModel::NnModel(Matrix points, std::vector<int> labels) : points_(std::move(points)), labels_(std::move(labels)) {
  if (points_.rows() == 0) throw Error(ErrorKind::InvalidArgument, "nearest-neighbour model needs training points");
  if (static_cast<std::size_t>(points_.rows()) != labels_.size()) {
    throw Error(ErrorKind::InvalidArgument, "label count does not match the number of training points");
  }
}

std::size_t NnModel::nearest(const Vector& query) const {
  if (static_cast<std::size_t>(query.size()) != dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "query has dimension " + std::to_string(query.size()) + ", model has " + std::to_string(dim()));
  }
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < points_.rows(); ++a) {
    const double d2 = (points_.row(a).transpose() - query).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<std::size_t>(a);
    }
  }
  return best;
}

int NnModel::classify(const Vector& query) const { return labels_[nearest(query)]; }

double accuracy(const NnModel& model, const Matrix& queries, std::span<const int> truth) {
  if (queries.rows() == 0) throw Error(ErrorKind::InvalidArgument, "accuracy needs a non-empty test set");
  if (static_cast<std::size_t>(queries.rows()) != truth.size()) {
    throw Error(ErrorKind::InvalidArgument, "query count does not match label count");
  }
  std::size_t correct = 0;
  for (Eigen::Index a = 0; a < queries.rows(); ++a) {
    correct += model.classify(queries.row(a).transpose()) == truth[static_cast<std::size_t>(a)];
  }
  return static_cast<double>(correct) / static_cast<double>(queries.rows());
}

}  // namespace nwfe
