#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "aim/dataset.hpp"
#include "aim/execution.hpp"

namespace aim {

struct ComparabilityConfig {
  // Largest allowed per-feature numerical gap, in normalized units.
  double numerical_threshold = 0.1;
  // Largest allowed number of differing categorical features.
  int categorical_threshold = 2;

  void validate() const;
};

// Both bounds are inclusive.
bool is_comparable(std::span<const double> r1, std::span<const CategoryCode> d1,
                   std::span<const double> r2, std::span<const CategoryCode> d2,
                   const ComparabilityConfig& cfg);
bool is_comparable(const Dataset& d, std::size_t i, std::size_t j, const ComparabilityConfig& cfg);

// Symmetric, loop-free adjacency in compressed-row form. Neighbor lists are
// sorted ascending.
class ComparabilityGraph {
 public:
  ComparabilityGraph() = default;
  ComparabilityGraph(std::vector<std::size_t> offsets, std::vector<std::size_t> neighbors);
  static ComparabilityGraph from_edges(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::vector<std::size_t> degrees() const;
  std::span<const std::size_t> neighbors(std::size_t i) const {
    return {neighbors_.data() + offsets_[i], degree(i)};
  }
  bool has_edge(std::size_t i, std::size_t j) const;
  std::size_t num_edges() const { return neighbors_.size() / 2; }
  std::size_t num_isolated() const;

  const std::vector<std::size_t>& offsets() const { return offsets_; }
  const std::vector<std::size_t>& adjacency() const { return neighbors_; }

  friend bool operator==(const ComparabilityGraph&, const ComparabilityGraph&) = default;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> neighbors_;
};

struct GraphBuildOptions {
  Execution execution = Execution::parallel;
  // Sort on the first numerical feature and only test pairs whose gap on it is
  // within the threshold. Exact; parallel path only.
  bool prefilter = true;
};

ComparabilityGraph build_comparability_graph(const Dataset& d, const ComparabilityConfig& cfg,
                                             const GraphBuildOptions& options = {});

}  // namespace aim
