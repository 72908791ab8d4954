#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nwfe/dataset.hpp"

namespace nwfe {

/// Symmetric table of Euclidean distances with a zero diagonal. Storage is a
/// square buffer with spare capacity so that appending a sample costs O(N)
/// amortised.
class DistanceTable {
 public:
  DistanceTable() = default;
  explicit DistanceTable(std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t a, std::size_t b) const { return data_[a * capacity_ + b]; }

  /// Row `a`, restricted to the live N columns.
  std::span<const double> row(std::size_t a) const { return {data_.data() + a * capacity_, n_}; }

  void set(std::size_t a, std::size_t b, double d) {
    data_[a * capacity_ + b] = d;
    data_[b * capacity_ + a] = d;
  }

  /// Adds sample N with the given distances to samples 0..N-1.
  void append(std::span<const double> to_existing);

 private:
  void reserve(std::size_t capacity);

  std::size_t n_ = 0;
  std::size_t capacity_ = 0;
  std::vector<double> data_;
};

DistanceTable pairwise_distances(std::span<const Vector> samples);
DistanceTable pairwise_distances(const LabeledDataset& ds);

}  // namespace nwfe
