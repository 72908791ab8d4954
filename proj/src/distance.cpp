#include "nwfe/distance.hpp"

#include <algorithm>

#include "nwfe/error.hpp"

namespace nwfe {

DistanceTable::DistanceTable(std::size_t n) : n_(n), capacity_(n), data_(n * n, 0.0) {}

void DistanceTable::reserve(std::size_t capacity) {
  if (capacity <= capacity_) return;
  std::vector<double> grown(capacity * capacity, 0.0);
  for (std::size_t a = 0; a < n_; ++a) {
    std::copy_n(data_.data() + a * capacity_, n_, grown.data() + a * capacity);
  }
  data_ = std::move(grown);
  capacity_ = capacity;
}

void DistanceTable::append(std::span<const double> to_existing) {
  if (to_existing.size() != n_) {
    throw Error(ErrorKind::DimensionMismatch, "distance row length must equal the current table size");
  }
  if (n_ == capacity_) reserve(std::max<std::size_t>(16, 2 * capacity_));
  const std::size_t b = n_++;
  for (std::size_t a = 0; a < b; ++a) set(a, b, to_existing[a]);
  data_[b * capacity_ + b] = 0.0;
}

DistanceTable pairwise_distances(std::span<const Vector> samples) {
  DistanceTable table(samples.size());
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      table.set(a, b, (samples[a] - samples[b]).norm());
    }
  }
  return table;
}

DistanceTable pairwise_distances(const LabeledDataset& ds) { return pairwise_distances(ds.samples()); }

}  // namespace nwfe
