#include "aim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "aim/errors.hpp"

namespace aim::synth {
namespace {

double score(std::span<const double> x, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * x[k];
  return s;
}

std::vector<std::size_t> target_rows(const Dataset& d) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.group(i) == kTargetGroup) rows.push_back(i);
  }
  return rows;
}

Dataset relabel(const Dataset& d, std::vector<Label> labels) {
  return Dataset(d.schema(), d.numericals(), d.categoricals(), std::move(labels), d.groups(), d.category_names(),
                 d.label_tokens(), d.group_tokens());
}

}  // namespace

std::vector<double> SynthConfig::boundary_weights() const {
  if (!weights.empty()) return weights;
  return std::vector<double>(dim, 1.0 / static_cast<double>(dim));
}

void SynthConfig::validate() const {
  if (n_per_group == 0) throw std::invalid_argument("n_per_group must be at least 1");
  if (dim == 0) throw std::invalid_argument("feature dimension must be at least 1");
  if (!weights.empty() && weights.size() != dim) throw std::invalid_argument("boundary weights must have length dim");
  if (!(flip_rate >= 0.0 && flip_rate <= 1.0)) throw std::invalid_argument("flip rate must lie in [0, 1]");
}

std::size_t GroundTruth::count() const {
  return static_cast<std::size_t>(std::count(biased.begin(), biased.end(), std::uint8_t{1}));
}

FeatureSchema synthetic_schema(std::size_t dim) {
  FeatureSchema s;
  for (std::size_t k = 0; k < dim; ++k) s.numerical.push_back(fmt::format("x{}", k + 1));
  s.label = "y";
  s.group = "s";
  return s;
}

std::string synthetic_schema_text(std::size_t dim) {
  const auto s = synthetic_schema(dim);
  return fmt::format("numerical = {}\ncategorical =\nlabel = {}\ngroup = {}\n", fmt::join(s.numerical, ", "),
                     s.label, s.group);
}

Dataset generate_base(const SynthConfig& cfg) {
  cfg.validate();
  const auto n = 2 * cfg.n_per_group;
  const auto w = cfg.boundary_weights();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RealMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.dim));
  std::vector<Label> y(n);
  std::vector<Group> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < cfg.dim; ++k) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = unit(rng);
    s[i] = i < cfg.n_per_group ? kReferenceGroup : kTargetGroup;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> row(x.data() + i * cfg.dim, cfg.dim);
    y[i] = score(row, w) >= cfg.threshold ? 1 : 0;
  }
  return Dataset(synthetic_schema(cfg.dim), std::move(x), CodeMatrix(static_cast<Eigen::Index>(n), 0), std::move(y),
                 std::move(s));
}

BiasedDataset inject_group_bias(const Dataset& base, const SynthConfig& cfg) {
  const auto w = cfg.boundary_weights();
  if (w.size() != base.num_numerical()) throw std::invalid_argument("config dimension does not match the dataset");
  auto labels = base.labels();
  GroundTruth truth{std::vector<std::uint8_t>(base.size(), 0)};
  for (auto i : target_rows(base)) {
    const double z = score(base.numerical_row(i), w);
    labels[i] = z >= cfg.threshold + cfg.shift ? 1 : 0;
    const Label reference = z >= cfg.threshold ? 1 : 0;
    truth.biased[i] = labels[i] != reference ? 1 : 0;
  }
  return {relabel(base, std::move(labels)), std::move(truth)};
}

BiasedDataset inject_individual_bias(const Dataset& base, const SynthConfig& cfg) {
  cfg.validate();
  auto rows = target_rows(base);
  // The epsilon keeps products like 0.29 * 100 from flooring one short.
  const auto flips =
      static_cast<std::size_t>(std::floor(cfg.flip_rate * static_cast<double>(rows.size()) + 1e-9));
  // Separate stream from the feature sampler so the flip set does not shift the features.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(flips);
  auto labels = base.labels();
  GroundTruth truth{std::vector<std::uint8_t>(base.size(), 0)};
  for (auto i : rows) {
    labels[i] = 1 - labels[i];
    truth.biased[i] = 1;
  }
  return {relabel(base, std::move(labels)), std::move(truth)};
}

std::vector<Label> reference_labels(const BiasedDataset& d) {
  auto labels = d.data.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (d.truth.biased[i]) labels[i] = 1 - labels[i];
  }
  return labels;
}

double detection_accuracy(const BiasVector& b, const GroundTruth& truth, std::span<const Group> groups,
                          Group target) {
  if (b.size() != truth.biased.size() || b.size() != groups.size()) {
    throw std::invalid_argument("bias, truth and group vectors are not aligned");
  }
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (groups[i] != target) continue;
    ++total;
    correct += b.biased(i) == (truth.biased[i] != 0) ? 1 : 0;
  }
  if (total == 0) throw ValidationError("no target-group samples to score");
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::string format_truth(const GroundTruth& truth) {
  std::string out;
  out.reserve(truth.biased.size() * 2);
  for (auto flag : truth.biased) {
    out.push_back(flag ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

GroundTruth parse_truth(const std::string& text) {
  GroundTruth truth;
  std::stringstream ss(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line != "0" && line != "1") throw ParseError(row, "truth flags must be 0 or 1");
    truth.biased.push_back(line == "1" ? 1 : 0);
    ++row;
  }
  return truth;
}

}  // namespace aim::synth
