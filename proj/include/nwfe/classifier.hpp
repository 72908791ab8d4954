#pragma once

#include <span>
#include <vector>

#include "nwfe/dataset.hpp"

namespace nwfe {

/// 1-nearest-neighbour model over projected training samples (linear scan).
class NnModel {
 public:
  /// `points` is N x d. Throws InvalidArgument when empty or mis-sized.
  NnModel(Matrix points, std::vector<int> labels);

  /// Label of the closest training point; ties go to the smallest index.
  int classify(const Vector& query) const;
  std::size_t nearest(const Vector& query) const;

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }

 private:
  Matrix points_;
  std::vector<int> labels_;
};

/// Fraction of rows of `queries` whose predicted label equals `truth`.
double accuracy(const NnModel& model, const Matrix& queries, std::span<const int> truth);

}  // namespace nwfe
