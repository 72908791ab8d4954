#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace nwfe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Labeled samples partitioned by class.
///
/// Labels are dense class identifiers 0..L-1 and every class holds at least
/// one sample, except in a dataset produced by subset(), where classes absent
/// from the chosen rows stay defined but empty (a held-out fold, say). Such a
/// dataset can be projected and scored, but fitting rejects it. The object is
/// immutable once constructed.
class LabeledDataset {
 public:
  /// `label_names` may be empty, in which case names "0".."L-1" are generated
  /// and L is taken as max(label)+1. Throws InvalidArgument if the samples are
  /// empty, have inconsistent dimension, or a class in 0..L-1 has no sample.
  LabeledDataset(std::vector<Vector> samples, std::vector<int> labels,
                 std::vector<std::string> label_names = {});

  std::size_t size() const { return samples_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t num_classes() const { return class_index_.size(); }

  const Vector& sample(std::size_t a) const { return samples_[a]; }
  int label(std::size_t a) const { return labels_[a]; }
  std::span<const Vector> samples() const { return samples_; }
  std::span<const int> labels() const { return labels_; }

  /// Sample positions of class `c`, in dataset order.
  std::span<const std::size_t> members(int c) const { return class_index_[static_cast<std::size_t>(c)]; }
  const std::vector<std::string>& label_names() const { return label_names_; }

  /// Rows stacked into an N x p matrix.
  Matrix matrix() const;

  /// Rows `rows` in the given order, keeping label ids and names. Classes
  /// with no selected row remain, with no members.
  LabeledDataset subset(std::span<const std::size_t> rows) const;

  /// True if some class has no member.
  bool has_empty_class() const;

 private:
  struct AllowEmpty {};
  LabeledDataset(std::vector<Vector> samples, std::vector<int> labels, std::vector<std::string> label_names,
                 AllowEmpty);
  void index_classes(bool allow_empty);

  std::vector<Vector> samples_;
  std::vector<int> labels_;
  std::vector<std::vector<std::size_t>> class_index_;
  std::vector<std::string> label_names_;
  std::size_t dim_ = 0;
};

/// N_i for every class, in class-id order.
std::vector<std::size_t> class_sizes(const LabeledDataset& ds);

/// Column selector: a header name or a 0-based column index.
using LabelColumn = std::variant<std::monostate, std::string, std::size_t>;

/// Parse a header-first, comma-separated file. The label column defaults to
/// the last column. Labels are remapped to 0..L-1 in first-appearance order and
/// the original strings are kept as label names.
LabeledDataset read_csv(std::istream& in, const LabelColumn& label_column = {});
LabeledDataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column = {});

/// Feature columns f0..f{p-1} followed by `label`, values in shortest
/// round-trip form so that reloading reproduces the dataset exactly.
void write_csv(const LabeledDataset& ds, std::ostream& out);
void save_csv(const LabeledDataset& ds, const std::filesystem::path& path);

/// Per-feature z-scoring (population standard deviation); constant features
/// are only centred.
LabeledDataset standardize(const LabeledDataset& ds);

}  // namespace nwfe
