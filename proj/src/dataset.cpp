#include "nwfe/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "nwfe/error.hpp"

namespace nwfe {

LabeledDataset::LabeledDataset(std::vector<Vector> samples, std::vector<int> labels,
                               std::vector<std::string> label_names)
    : samples_(std::move(samples)), labels_(std::move(labels)), label_names_(std::move(label_names)) {
  index_classes(false);
}

LabeledDataset::LabeledDataset(std::vector<Vector> samples, std::vector<int> labels,
                               std::vector<std::string> label_names, AllowEmpty)
    : samples_(std::move(samples)), labels_(std::move(labels)), label_names_(std::move(label_names)) {
  index_classes(true);
}

void LabeledDataset::index_classes(bool allow_empty) {
  if (samples_.empty()) throw Error(ErrorKind::InvalidArgument, "dataset has no samples");
  if (labels_.size() != samples_.size()) {
    throw Error(ErrorKind::InvalidArgument, "label count does not match sample count");
  }
  dim_ = static_cast<std::size_t>(samples_.front().size());
  if (dim_ == 0) throw Error(ErrorKind::InvalidArgument, "samples must have dimension >= 1");

  int max_label = -1;
  for (std::size_t a = 0; a < samples_.size(); ++a) {
    if (static_cast<std::size_t>(samples_[a].size()) != dim_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "sample " + std::to_string(a) + " has dimension " +
                      std::to_string(samples_[a].size()) + ", expected " + std::to_string(dim_));
    }
    if (labels_[a] < 0) throw Error(ErrorKind::InvalidArgument, "negative class label");
    max_label = std::max(max_label, labels_[a]);
  }

  if (label_names_.empty()) {
    for (int c = 0; c <= max_label; ++c) label_names_.push_back(std::to_string(c));
  } else if (static_cast<std::size_t>(max_label) >= label_names_.size()) {
    throw Error(ErrorKind::InvalidArgument, "label id exceeds the number of label names");
  }

  class_index_.resize(label_names_.size());
  for (std::size_t a = 0; a < labels_.size(); ++a) {
    class_index_[static_cast<std::size_t>(labels_[a])].push_back(a);
  }
  for (std::size_t c = 0; c < class_index_.size(); ++c) {
    if (class_index_[c].empty() && !allow_empty) {
      throw Error(ErrorKind::InvalidArgument, "class '" + label_names_[c] + "' has no samples");
    }
  }
}

bool LabeledDataset::has_empty_class() const {
  return std::any_of(class_index_.begin(), class_index_.end(), [](const auto& m) { return m.empty(); });
}

Matrix LabeledDataset::matrix() const {
  Matrix x(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t a = 0; a < size(); ++a) x.row(static_cast<Eigen::Index>(a)) = samples_[a].transpose();
  return x;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Vector> xs;
  std::vector<int> ys;
  xs.reserve(rows.size());
  ys.reserve(rows.size());
  for (auto r : rows) {
    if (r >= size()) throw Error(ErrorKind::InvalidArgument, "subset row out of range");
    xs.push_back(samples_[r]);
    ys.push_back(labels_[r]);
  }
  return LabeledDataset(std::move(xs), std::move(ys), label_names_, AllowEmpty{});
}

std::vector<std::size_t> class_sizes(const LabeledDataset& ds) {
  std::vector<std::size_t> sizes(ds.num_classes());
  for (std::size_t c = 0; c < sizes.size(); ++c) sizes[c] = ds.members(static_cast<int>(c)).size();
  return sizes;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_real(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

std::size_t resolve_label_column(const LabelColumn& sel, const std::vector<std::string_view>& header) {
  if (std::holds_alternative<std::monostate>(sel)) return header.size() - 1;
  if (const auto* idx = std::get_if<std::size_t>(&sel)) {
    if (*idx >= header.size()) {
      throw Error(ErrorKind::MissingLabelColumn,
                  "column index " + std::to_string(*idx) + " out of range (" +
                      std::to_string(header.size()) + " columns)");
    }
    return *idx;
  }
  const auto& name = std::get<std::string>(sel);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  // Fall back to a numeric index when no header matches.
  std::size_t idx = 0;
  auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), idx);
  if (!name.empty() && ec == std::errc() && ptr == name.data() + name.size()) {
    return resolve_label_column(LabelColumn{idx}, header);
  }
  throw Error(ErrorKind::MissingLabelColumn, "no column named '" + name + "'");
}

}  // namespace

LabeledDataset read_csv(std::istream& in, const LabelColumn& label_column) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header_line = line;
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorKind::EmptyFile, "no header row");

  const auto header = split_fields(header_line);
  const std::size_t arity = header.size();
  if (arity < 2) throw Error(ErrorKind::MissingLabelColumn, "need at least one feature column and a label column");
  const std::size_t label_col = resolve_label_column(label_column, header);

  std::vector<Vector> samples;
  std::vector<int> labels;
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != arity) {
      throw Error(ErrorKind::RaggedRow, "line " + std::to_string(line_no) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(arity));
    }
    Vector x(static_cast<Eigen::Index>(arity - 1));
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == label_col) continue;
      double v = 0.0;
      if (!parse_real(fields[c], v)) {
        throw Error(ErrorKind::NonNumericFeature, "line " + std::to_string(line_no) + ", column " +
                                                      std::to_string(c) + ": '" +
                                                      std::string(fields[c]) + "'");
      }
      x[k++] = v;
    }
    std::string label(fields[label_col]);
    auto [it, inserted] = ids.try_emplace(label, static_cast<int>(names.size()));
    if (inserted) names.push_back(label);
    samples.push_back(std::move(x));
    labels.push_back(it->second);
  }
  if (samples.empty()) throw Error(ErrorKind::EmptyFile, "no data rows after the header");
  return LabeledDataset(std::move(samples), std::move(labels), std::move(names));
}

LabeledDataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_csv(in, label_column);
}

void write_csv(const LabeledDataset& ds, std::ostream& out) {
  for (std::size_t d = 0; d < ds.dim(); ++d) out << 'f' << d << ',';
  out << "label\n";
  char buf[64];
  for (std::size_t a = 0; a < ds.size(); ++a) {
    const auto& x = ds.sample(a);
    for (Eigen::Index d = 0; d < x.size(); ++d) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x[d]);
      out.write(buf, ptr - buf);
      out << ',';
    }
    out << ds.label_names()[static_cast<std::size_t>(ds.label(a))] << '\n';
  }
}

void save_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_csv(ds, out);
}

LabeledDataset standardize(const LabeledDataset& ds) {
  const Matrix x = ds.matrix();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Matrix centred = x.rowwise() - mean;
  const Eigen::RowVectorXd sd =
      (centred.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt();
  std::vector<Vector> out;
  out.reserve(ds.size());
  for (Eigen::Index a = 0; a < x.rows(); ++a) {
    Vector z = centred.row(a).transpose();
    for (Eigen::Index d = 0; d < z.size(); ++d) {
      if (sd[d] > 0.0) z[d] /= sd[d];
    }
    out.push_back(std::move(z));
  }
  return LabeledDataset(std::move(out), {ds.labels().begin(), ds.labels().end()}, ds.label_names());
}

}  // namespace nwfe
