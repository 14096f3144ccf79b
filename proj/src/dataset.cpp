#include "aim/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "aim/diagnostics.hpp"
#include "aim/errors.hpp"

namespace aim {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

// Splits one record; double quotes protect delimiters and "" escapes a quote.
std::vector<std::string> split_record(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delim) {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

bool is_missing(const std::string& tok) { return tok.empty() || tok == "NA" || tok == "?"; }

std::optional<double> parse_real(const std::string& tok) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

// Maps a binary column to {0,1}; `positive` names the token mapped to 1.
class BinaryColumnMapper {
 public:
  BinaryColumnMapper(std::string column, std::optional<std::string> positive)
      : column_(std::move(column)), positive_(std::move(positive)) {
    if (positive_) tokens_[1] = *positive_;
  }

  std::uint8_t map(const std::string& tok, std::size_t row) {
    if (positive_) {
      if (tok == *positive_) return 1;
      if (!negative_seen_) {
        tokens_[0] = tok;
        negative_seen_ = true;
      } else if (tok != tokens_[0]) {
        throw ValidationError(fmt::format("column '{}' row {}: value '{}' is a third distinct value; "
                                          "only binary columns are supported",
                                          column_, row, tok));
      }
      return 0;
    }
    const auto v = parse_real(tok);
    if (!v || (*v != 0.0 && *v != 1.0)) {
      throw ValidationError(
          fmt::format("column '{}' row {}: value '{}' is not 0/1", column_, row, tok));
    }
    return *v == 1.0 ? 1 : 0;
  }

  std::array<std::string, 2> tokens() const {
    auto t = tokens_;
    if (!positive_) t = {"0", "1"};
    if (t[0].empty()) t[0] = "not_" + t[1];
    return t;
  }

 private:
  std::string column_;
  std::optional<std::string> positive_;
  std::array<std::string, 2> tokens_{};
  bool negative_seen_ = false;
};

std::string quote_if_needed(const std::string& s, char delim) {
  if (s.find(delim) == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void FeatureSchema::validate() const {
  if (num_features() == 0) throw SchemaError("schema declares no features");
  if (label.empty()) throw SchemaError("schema declares no label column");
  if (group.empty()) throw SchemaError("schema declares no group column");
  std::set<std::string> seen;
  auto claim = [&](const std::string& name) {
    if (!seen.insert(name).second) throw SchemaError("column '" + name + "' is declared twice");
  };
  for (const auto& n : numerical) claim(n);
  for (const auto& n : categorical) claim(n);
  claim(label);
  claim(group);
}

SchemaDescriptor parse_schema(const std::string& text) {
  SchemaDescriptor out;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw SchemaError(fmt::format("schema line {}: expected key = value", line_no));
    }
    const auto key = trim(t.substr(0, eq));
    const auto value = trim(t.substr(eq + 1));
    if (key == "numerical") {
      out.features.numerical = split_list(value);
    } else if (key == "categorical") {
      out.features.categorical = split_list(value);
    } else if (key == "label") {
      out.features.label = value;
    } else if (key == "group") {
      out.features.group = value;
    } else if (key == "favorable") {
      out.favorable = value;
    } else if (key == "privileged") {
      out.privileged = value;
    } else if (key == "delimiter") {
      if (value == "tab" || value == "\\t") {
        out.delimiter = '\t';
      } else if (value.size() == 1) {
        out.delimiter = value[0];
      } else {
        throw SchemaError(fmt::format("schema line {}: delimiter must be one character", line_no));
      }
    } else {
      throw SchemaError(fmt::format("schema line {}: unknown key '{}'", line_no, key));
    }
  }
  out.features.validate();
  return out;
}

SchemaDescriptor load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_schema(buf.str());
}

Dataset::Dataset(FeatureSchema schema, RealMatrix numericals, CodeMatrix categoricals,
                 std::vector<Label> labels, std::vector<Group> groups,
                 std::vector<std::vector<std::string>> category_names,
                 std::array<std::string, 2> label_tokens, std::array<std::string, 2> group_tokens)
    : schema_(std::move(schema)),
      numericals_(std::move(numericals)),
      categoricals_(std::move(categoricals)),
      labels_(std::move(labels)),
      groups_(std::move(groups)),
      category_names_(std::move(category_names)),
      label_tokens_(std::move(label_tokens)),
      group_tokens_(std::move(group_tokens)) {
  schema_.validate();
  const auto n = labels_.size();
  const auto n_r = schema_.numerical.size();
  const auto n_d = schema_.categorical.size();
  if (n_r == 0 && numericals_.size() == 0) numericals_.resize(static_cast<Eigen::Index>(n), 0);
  if (n_d == 0 && categoricals_.size() == 0) categoricals_.resize(static_cast<Eigen::Index>(n), 0);
  if (groups_.size() != n || static_cast<std::size_t>(numericals_.rows()) != n ||
      static_cast<std::size_t>(categoricals_.rows()) != n) {
    throw ValidationError("dataset columns have inconsistent lengths");
  }
  if (static_cast<std::size_t>(numericals_.cols()) != n_r ||
      static_cast<std::size_t>(categoricals_.cols()) != n_d) {
    throw ValidationError("dataset matrices do not match the schema's feature counts");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels_[i] > 1) throw ValidationError(fmt::format("label at row {} is not 0/1", i));
    if (groups_[i] > 1) throw ValidationError(fmt::format("group at row {} is not 0/1", i));
  }
  if (!numericals_.allFinite()) throw ValidationError("numerical features must be finite");
  if (category_names_.empty() && n_d > 0) {
    category_names_.resize(n_d);
    for (std::size_t f = 0; f < n_d; ++f) {
      const CategoryCode hi = n == 0 ? -1 : categoricals_.col(static_cast<Eigen::Index>(f)).maxCoeff();
      for (CategoryCode c = 0; c <= hi; ++c) category_names_[f].push_back(std::to_string(c));
    }
  }
  if (category_names_.size() != n_d) {
    throw ValidationError("category dictionaries do not match the categorical feature count");
  }
  for (std::size_t f = 0; f < n_d; ++f) {
    const auto cats = static_cast<CategoryCode>(category_names_[f].size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = categoricals_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
      if (c < 0 || c >= cats) {
        throw ValidationError(fmt::format("category code {} at row {} is outside the dictionary of '{}'",
                                          c, i, schema_.categorical[f]));
      }
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  const auto m = static_cast<Eigen::Index>(indices.size());
  RealMatrix num(m, numericals_.cols());
  CodeMatrix cat(m, categoricals_.cols());
  std::vector<Label> y(indices.size());
  std::vector<Group> s(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = indices[k];
    if (i >= size()) throw std::out_of_range(fmt::format("row index {} out of range (n = {})", i, size()));
    num.row(static_cast<Eigen::Index>(k)) = numericals_.row(static_cast<Eigen::Index>(i));
    cat.row(static_cast<Eigen::Index>(k)) = categoricals_.row(static_cast<Eigen::Index>(i));
    y[k] = labels_[i];
    s[k] = groups_[i];
  }
  return Dataset(schema_, std::move(num), std::move(cat), std::move(y), std::move(s), category_names_,
                 label_tokens_, group_tokens_);
}

Dataset Dataset::with_numericals(RealMatrix numericals) const {
  return Dataset(schema_, std::move(numericals), categoricals_, labels_, groups_, category_names_,
                 label_tokens_, group_tokens_);
}

std::size_t Dataset::cell_count(Label y, Group s) const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i) count += (labels_[i] == y && groups_[i] == s) ? 1 : 0;
  return count;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.schema_.numerical == b.schema_.numerical && a.schema_.categorical == b.schema_.categorical &&
         a.schema_.label == b.schema_.label && a.schema_.group == b.schema_.group &&
         a.numericals_ == b.numericals_ && a.categoricals_ == b.categoricals_ &&
         a.labels_ == b.labels_ && a.groups_ == b.groups_ && a.category_names_ == b.category_names_;
}

Dataset parse_dataset(const std::string& text, const SchemaDescriptor& schema) {
  const auto& fs = schema.features;
  fs.validate();
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw SchemaError("input has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_record(line, schema.delimiter);
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) column_of.emplace(header[c], c);
  auto locate = [&](const std::string& name) {
    const auto it = column_of.find(name);
    if (it == column_of.end()) throw SchemaError("missing column '" + name + "'");
    return it->second;
  };
  std::vector<std::size_t> num_cols, cat_cols;
  for (const auto& n : fs.numerical) num_cols.push_back(locate(n));
  for (const auto& n : fs.categorical) cat_cols.push_back(locate(n));
  const auto label_col = locate(fs.label);
  const auto group_col = locate(fs.group);

  std::vector<std::vector<double>> num_rows;
  std::vector<std::vector<CategoryCode>> cat_rows;
  std::vector<Label> labels;
  std::vector<Group> groups;
  std::vector<std::vector<std::string>> dictionaries(cat_cols.size());
  std::vector<std::unordered_map<std::string, CategoryCode>> code_of(cat_cols.size());
  BinaryColumnMapper label_map(fs.label, schema.favorable);
  BinaryColumnMapper group_map(fs.group, schema.privileged);

  std::size_t row = 0;
  while (std::getline(ss, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_record(line, schema.delimiter);
    if (fields.size() != header.size()) {
      throw ParseError(row, fmt::format("expected {} fields, found {}", header.size(), fields.size()));
    }
    auto field = [&](std::size_t col) -> const std::string& {
      const auto& tok = fields[col];
      if (is_missing(tok)) throw ValidationError(fmt::format("row {}: missing value in column '{}'", row, header[col]));
      return tok;
    };
    std::vector<double> r;
    r.reserve(num_cols.size());
    for (std::size_t k = 0; k < num_cols.size(); ++k) {
      const auto& tok = field(num_cols[k]);
      const auto v = parse_real(tok);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(row, fmt::format("non-numeric value '{}' in numerical column '{}'", tok, fs.numerical[k]));
      }
      r.push_back(*v);
    }
    std::vector<CategoryCode> d;
    d.reserve(cat_cols.size());
    for (std::size_t k = 0; k < cat_cols.size(); ++k) {
      const auto& tok = field(cat_cols[k]);
      auto [it, inserted] = code_of[k].emplace(tok, static_cast<CategoryCode>(dictionaries[k].size()));
      if (inserted) dictionaries[k].push_back(tok);
      d.push_back(it->second);
    }
    labels.push_back(label_map.map(field(label_col), row));
    groups.push_back(group_map.map(field(group_col), row));
    num_rows.push_back(std::move(r));
    cat_rows.push_back(std::move(d));
    ++row;
  }

  const auto n = static_cast<Eigen::Index>(labels.size());
  RealMatrix num(n, static_cast<Eigen::Index>(num_cols.size()));
  CodeMatrix cat(n, static_cast<Eigen::Index>(cat_cols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < num.cols(); ++k) num(i, k) = num_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    for (Eigen::Index k = 0; k < cat.cols(); ++k) cat(i, k) = cat_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  return Dataset(fs, std::move(num), std::move(cat), std::move(labels), std::move(groups),
                 std::move(dictionaries), label_map.tokens(), group_map.tokens());
}

Dataset load_dataset(const std::filesystem::path& path, const SchemaDescriptor& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), schema);
}

std::string format_dataset(const Dataset& d, char delimiter) {
  const auto& fs = d.schema();
  std::string out;
  std::vector<std::string> head;
  for (const auto& n : fs.numerical) head.push_back(quote_if_needed(n, delimiter));
  for (const auto& n : fs.categorical) head.push_back(quote_if_needed(n, delimiter));
  head.push_back(quote_if_needed(fs.label, delimiter));
  head.push_back(quote_if_needed(fs.group, delimiter));
  out += fmt::format("{}\n", fmt::join(head, std::string(1, delimiter)));
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::vector<std::string> fields;
    for (double v : d.numerical_row(i)) fields.push_back(fmt::format("{}", v));
    const auto cats = d.categorical_row(i);
    for (std::size_t f = 0; f < cats.size(); ++f) {
      fields.push_back(quote_if_needed(d.categories(f)[static_cast<std::size_t>(cats[f])], delimiter));
    }
    fields.push_back(quote_if_needed(d.label_tokens()[d.label(i)], delimiter));
    fields.push_back(quote_if_needed(d.group_tokens()[d.group(i)], delimiter));
    out += fmt::format("{}\n", fmt::join(fields, std::string(1, delimiter)));
  }
  return out;
}

NormalizationParams fit_normalization(const Dataset& train) {
  if (train.size() == 0) throw ValidationError("cannot fit normalization on an empty dataset");
  NormalizationParams p;
  const auto& x = train.numericals();
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    p.ranges.push_back({x.col(k).minCoeff(), x.col(k).maxCoeff()});
  }
  return p;
}

Dataset apply_normalization(const Dataset& d, const NormalizationParams& params) {
  if (params.ranges.size() != d.num_numerical()) {
    throw ValidationError("normalization parameters do not match the numerical feature count");
  }
  RealMatrix x = d.numericals();
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const auto [lo, hi] = params.ranges[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      x(i, k) = hi > lo ? std::clamp((x(i, k) - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    }
  }
  return d.with_numericals(std::move(x));
}

Dataset invert_normalization(const Dataset& d, const NormalizationParams& params) {
  if (params.ranges.size() != d.num_numerical()) {
    throw ValidationError("normalization parameters do not match the numerical feature count");
  }
  RealMatrix x = d.numericals();
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const auto [lo, hi] = params.ranges[static_cast<std::size_t>(k)];
    x.col(k) = (x.col(k).array() * (hi - lo) + lo).matrix();
  }
  return d.with_numericals(std::move(x));
}

DesignMatrix encode_features(const Dataset& d, const EncodeOptions& options) {
  DesignMatrix out;
  for (std::size_t f = 0; f < d.num_numerical(); ++f) out.columns.push_back({ColumnKind::numerical, f, -1});
  std::vector<std::size_t> block_start;
  for (std::size_t f = 0; f < d.num_categorical(); ++f) {
    block_start.push_back(out.columns.size());
    for (std::size_t c = 0; c < d.categories(f).size(); ++c) {
      out.columns.push_back({ColumnKind::one_hot, f, static_cast<CategoryCode>(c)});
    }
  }
  if (options.include_group) {
    out.group_column = out.columns.size();
    out.columns.push_back({ColumnKind::group, 0, -1});
  }
  const auto n = static_cast<Eigen::Index>(d.size());
  out.values = RealMatrix::Zero(n, static_cast<Eigen::Index>(out.columns.size()));
  const auto n_r = static_cast<Eigen::Index>(d.num_numerical());
  if (n_r > 0) out.values.leftCols(n_r) = d.numericals();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cats = d.categorical_row(static_cast<std::size_t>(i));
    for (std::size_t f = 0; f < cats.size(); ++f) {
      out.values(i, static_cast<Eigen::Index>(block_start[f] + static_cast<std::size_t>(cats[f]))) = 1.0;
    }
    if (out.group_column) {
      out.values(i, static_cast<Eigen::Index>(*out.group_column)) = d.group(static_cast<std::size_t>(i));
    }
  }
  return out;
}

std::vector<SplitPartition> stratified_split(const Dataset& d, std::uint64_t seed, std::size_t folds) {
  if (folds < 3) throw std::invalid_argument("stratified_split needs at least 3 folds");
  const auto n = d.size();
  if (n < folds) throw ValidationError(fmt::format("cannot split {} samples into {} folds", n, folds));

  std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i) cells[{d.label(i), d.group(i)}].push_back(i);
  const bool small_cell = std::any_of(cells.begin(), cells.end(),
                                      [&](const auto& kv) { return kv.second.size() < folds; });
  if (small_cell) {
    diag::warn(fmt::format("a (label, group) cell has fewer than {} members; "
                           "stratifying on label only",
                           folds));
    cells.clear();
    for (std::size_t i = 0; i < n; ++i) cells[{d.label(i), 0}].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> fold_members(folds);
  std::size_t next = 0;
  for (auto& [key, members] : cells) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto i : members) fold_members[next++ % folds].push_back(i);
  }
  for (auto& f : fold_members) std::sort(f.begin(), f.end());

  std::vector<SplitPartition> out(folds);
  for (std::size_t p = 0; p < folds; ++p) {
    const auto valid_fold = (p + 1) % folds;
    auto& part = out[p];
    part.test = fold_members[p];
    part.valid = fold_members[valid_fold];
    for (std::size_t f = 0; f < folds; ++f) {
      if (f == p || f == valid_fold) continue;
      part.train.insert(part.train.end(), fold_members[f].begin(), fold_members[f].end());
    }
    std::sort(part.train.begin(), part.train.end());
  }
  return out;
}

}  // namespace aim
