#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace aim {

using Label = std::uint8_t;
using Group = std::uint8_t;
using CategoryCode = std::int32_t;

using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CodeMatrix = Eigen::Matrix<CategoryCode, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FeatureSchema {
  std::vector<std::string> numerical;
  std::vector<std::string> categorical;
  std::string label;
  std::string group;

  // Throws SchemaError on overlapping names, feature-listed label/group, or no features.
  void validate() const;
  std::size_t num_features() const { return numerical.size() + categorical.size(); }
};

// Parsed form of the key/value schema file.
struct SchemaDescriptor {
  FeatureSchema features;
  // Raw token mapped to label 1. When absent the column must already hold 0/1.
  std::optional<std::string> favorable;
  // Raw token mapped to group 1. When absent the column must already hold 0/1.
  std::optional<std::string> privileged;
  char delimiter = ',';
};

SchemaDescriptor load_schema(const std::filesystem::path& path);
SchemaDescriptor parse_schema(const std::string& text);

// Immutable table of samples (x_i, y_i, s_i). Numerical values are stored as
// given; call apply_normalization to map them into [0,1].
class Dataset {
 public:
  Dataset() = default;
  Dataset(FeatureSchema schema, RealMatrix numericals, CodeMatrix categoricals,
          std::vector<Label> labels, std::vector<Group> groups,
          std::vector<std::vector<std::string>> category_names = {},
          std::array<std::string, 2> label_tokens = {"0", "1"},
          std::array<std::string, 2> group_tokens = {"0", "1"});

  const FeatureSchema& schema() const { return schema_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t num_numerical() const { return schema_.numerical.size(); }
  std::size_t num_categorical() const { return schema_.categorical.size(); }

  const RealMatrix& numericals() const { return numericals_; }
  const CodeMatrix& categoricals() const { return categoricals_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<Group>& groups() const { return groups_; }

  std::span<const double> numerical_row(std::size_t i) const {
    return {numericals_.data() + i * num_numerical(), num_numerical()};
  }
  std::span<const CategoryCode> categorical_row(std::size_t i) const {
    return {categoricals_.data() + i * num_categorical(), num_categorical()};
  }
  Label label(std::size_t i) const { return labels_[i]; }
  Group group(std::size_t i) const { return groups_[i]; }

  // Category dictionary of categorical feature f: code -> raw token.
  const std::vector<std::string>& categories(std::size_t f) const { return category_names_[f]; }
  const std::vector<std::vector<std::string>>& category_names() const { return category_names_; }
  const std::array<std::string, 2>& label_tokens() const { return label_tokens_; }
  const std::array<std::string, 2>& group_tokens() const { return group_tokens_; }

  // Rows at `indices`, in that order. Dictionaries are shared with the source.
  Dataset subset(std::span<const std::size_t> indices) const;
  // Same schema and dictionaries, new numerical block.
  Dataset with_numericals(RealMatrix numericals) const;
  // Count of samples in the (label, group) cell.
  std::size_t cell_count(Label y, Group s) const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  FeatureSchema schema_;
  RealMatrix numericals_;
  CodeMatrix categoricals_;
  std::vector<Label> labels_;
  std::vector<Group> groups_;
  std::vector<std::vector<std::string>> category_names_;
  std::array<std::string, 2> label_tokens_{"0", "1"};
  std::array<std::string, 2> group_tokens_{"0", "1"};
};

// Reads delimiter-separated text with a header row. Rows keep file order;
// category codes follow first appearance per column. Missing values are rejected.
// ParseError rows are 0-based data rows, i.e. sample indices.
Dataset load_dataset(const std::filesystem::path& path, const SchemaDescriptor& schema);
Dataset parse_dataset(const std::string& text, const SchemaDescriptor& schema);

// Writes the dataset back in the ingestion format (numericals with up to 17
// significant digits, categoricals/label/group as their raw tokens).
std::string format_dataset(const Dataset& d, char delimiter = ',');

struct MinMax {
  double min = 0.0;
  double max = 0.0;
};

struct NormalizationParams {
  std::vector<MinMax> ranges;
};

NormalizationParams fit_normalization(const Dataset& train);
// (v - min) / (max - min), clipped to [0,1]; constant columns map to 0.
Dataset apply_normalization(const Dataset& d, const NormalizationParams& params);
// Maps normalized values back to the original scale.
Dataset invert_normalization(const Dataset& d, const NormalizationParams& params);

enum class ColumnKind { numerical, one_hot, group };

struct ColumnInfo {
  ColumnKind kind = ColumnKind::numerical;
  std::size_t feature = 0;       // index into numerical or categorical names
  CategoryCode category = -1;    // one_hot only
};

struct DesignMatrix {
  RealMatrix values;
  std::vector<ColumnInfo> columns;
  std::optional<std::size_t> group_column;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

struct EncodeOptions {
  // The sensitive attribute is appended as the final column so that
  // prediction consistency can flip it.
  bool include_group = true;
};

DesignMatrix encode_features(const Dataset& d, const EncodeOptions& options = {});

struct SplitPartition {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

// `folds` partitions; partition p tests on fold p, validates on fold p+1 and
// trains on the rest. Folds are stratified on (label, group), falling back to
// label-only stratification (with a warning) when a cell is smaller than `folds`.
std::vector<SplitPartition> stratified_split(const Dataset& d, std::uint64_t seed,
                                             std::size_t folds = 5);

}  // namespace aim
