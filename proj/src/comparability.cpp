#include "aim/comparability.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "aim/errors.hpp"
#include "aim/kernels/kernels.hpp"

namespace aim {

void ComparabilityConfig::validate() const {
  if (!(numerical_threshold > 0.0)) {
    throw std::invalid_argument(fmt::format("numerical threshold must be > 0 (got {})", numerical_threshold));
  }
  if (categorical_threshold < 0) {
    throw std::invalid_argument(fmt::format("categorical threshold must be >= 0 (got {})", categorical_threshold));
  }
}

bool is_comparable(std::span<const double> r1, std::span<const CategoryCode> d1,
                   std::span<const double> r2, std::span<const CategoryCode> d2,
                   const ComparabilityConfig& cfg) {
  if (r1.size() != r2.size() || d1.size() != d2.size()) {
    throw SchemaError("feature vectors do not share a schema");
  }
  for (std::size_t k = 0; k < r1.size(); ++k) {
    if (std::abs(r1[k] - r2[k]) > cfg.numerical_threshold) return false;
  }
  int differing = 0;
  for (std::size_t k = 0; k < d1.size(); ++k) {
    if (d1[k] != d2[k] && ++differing > cfg.categorical_threshold) return false;
  }
  return true;
}

bool is_comparable(const Dataset& d, std::size_t i, std::size_t j, const ComparabilityConfig& cfg) {
  return is_comparable(d.numerical_row(i), d.categorical_row(i), d.numerical_row(j), d.categorical_row(j), cfg);
}

ComparabilityGraph::ComparabilityGraph(std::vector<std::size_t> offsets, std::vector<std::size_t> neighbors)
    : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != neighbors_.size()) {
    throw std::invalid_argument("malformed compressed-row offsets");
  }
}

ComparabilityGraph ComparabilityGraph::from_edges(std::size_t n,
                                                  std::span<const std::pair<std::size_t, std::size_t>> edges) {
  std::vector<std::vector<std::size_t>> rows(n);
  for (auto [i, j] : edges) {
    if (i >= n || j >= n) throw std::out_of_range("edge endpoint out of range");
    if (i == j) continue;
    rows[i].push_back(j);
    rows[j].push_back(i);
  }
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> neighbors;
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    neighbors.insert(neighbors.end(), r.begin(), r.end());
    offsets.push_back(neighbors.size());
  }
  return ComparabilityGraph(std::move(offsets), std::move(neighbors));
}

std::vector<std::size_t> ComparabilityGraph::degrees() const {
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = degree(i);
  return out;
}

bool ComparabilityGraph::has_edge(std::size_t i, std::size_t j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::size_t ComparabilityGraph::num_isolated() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i) count += degree(i) == 0 ? 1 : 0;
  return count;
}

ComparabilityGraph build_comparability_graph(const Dataset& d, const ComparabilityConfig& cfg,
                                             const GraphBuildOptions& options) {
  cfg.validate();
  if (options.execution == Execution::serial) return kernels::serial::comparability_graph(d, cfg);
  return kernels::omp::comparability_graph(d, cfg, options.prefilter);
}

}  // namespace aim
