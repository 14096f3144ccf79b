#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "aim/comparability.hpp"
#include "aim/dataset.hpp"
#include "aim/execution.hpp"
#include "aim/similarity.hpp"

namespace aim {

// Samples with a bias score above this are reported as biased.
inline constexpr double kBiasThreshold = 0.5;

// Per-sample estimate; nullopt when the evidence mass is zero.
using Estimate = std::optional<double>;

struct CredibilityVector {
  std::vector<Estimate> values;

  std::size_t size() const { return values.size(); }
  bool defined(std::size_t i) const { return values[i].has_value(); }
  // Weight used when the entry enters a bias estimate (undefined counts as 0).
  double weight(std::size_t i) const { return values[i].value_or(0.0); }
};

struct BiasVector {
  std::vector<Estimate> values;

  std::size_t size() const { return values.size(); }
  bool defined(std::size_t i) const { return values[i].has_value(); }
  // Ranking score used by mitigation (undefined counts as 0).
  double score(std::size_t i) const { return values[i].value_or(0.0); }
  bool biased(std::size_t i) const { return score(i) > kBiasThreshold; }
};

CredibilityVector estimate_credibility(const Dataset& d, const SimilarityMatrix& q,
                                       Execution execution = Execution::parallel);

BiasVector estimate_bias(const Dataset& d, const SimilarityMatrix& q, const CredibilityVector& c,
                         Execution execution = Execution::parallel);

struct Explanation {
  std::size_t contributor = 0;
  double contribution = 0.0;
  double credibility = 0.0;
  double similarity = 0.0;
};

// Every other-group sample carrying weight c_j * Q[i,j] > 0, ordered by
// contribution (descending, ties by index). Contributions sum to b_i.
// Throws UndefinedBiasError when b_i has no evidence.
std::vector<Explanation> all_contributions(const Dataset& d, const SimilarityMatrix& q,
                                           const CredibilityVector& c, std::size_t i);

// The first k entries of all_contributions.
std::vector<Explanation> bias_contributions(const Dataset& d, const SimilarityMatrix& q,
                                            const CredibilityVector& c, std::size_t i, std::size_t k);

struct SampleAttribution {
  std::size_t index = 0;
  Group group = 0;
  Label label = 0;
  Estimate credibility;
  Estimate bias;
  std::vector<Explanation> explanations;
};

struct BiasReport {
  std::vector<SampleAttribution> records;
  CredibilityVector credibility;
  BiasVector bias;

  std::size_t num_defined_bias() const;
  std::size_t num_biased() const;
};

enum class SimilarityMode { rwr, adjacency };

struct AttributionOptions {
  ComparabilityConfig comparability;
  double damping = 0.1;
  SimilarityMode similarity = SimilarityMode::rwr;
  RwrOptions rwr;
  GraphBuildOptions graph;
  std::size_t top_k = 5;
  Execution execution = Execution::parallel;
};

// Comparability graph -> symmetric normalization -> RWR (or row-normalized adjacency).
SimilarityMatrix compute_similarity(const Dataset& d, const AttributionOptions& options);

BiasReport attribute(const Dataset& d, const SimilarityMatrix& q, const AttributionOptions& options);
BiasReport attribute(const Dataset& d, const AttributionOptions& options = {});
BiasReport attribute(const Dataset& d, const ComparabilityConfig& cfg, double damping);

}  // namespace aim
