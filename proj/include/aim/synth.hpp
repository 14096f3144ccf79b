#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aim/attribution.hpp"
#include "aim/dataset.hpp"

namespace aim::synth {

// Group 1 keeps the reference labeling rule; discrimination is injected into group 0.
inline constexpr Group kReferenceGroup = 1;
inline constexpr Group kTargetGroup = 0;

struct SynthConfig {
  std::size_t n_per_group = 500;
  std::size_t dim = 2;
  // Linear boundary y = [w . x >= threshold]. Empty weights mean (1/dim, ..., 1/dim).
  std::vector<double> weights;
  double threshold = 0.5;
  // Target-group threshold becomes threshold + shift under group bias.
  double shift = 0.2;
  double flip_rate = 0.10;
  std::uint64_t seed = 0;

  std::vector<double> boundary_weights() const;
  void validate() const;
};

// True where the recorded label departs from the reference rule.
struct GroundTruth {
  std::vector<std::uint8_t> biased;

  std::size_t count() const;
};

struct BiasedDataset {
  Dataset data;
  GroundTruth truth;
};

FeatureSchema synthetic_schema(std::size_t dim);
std::string synthetic_schema_text(std::size_t dim);

// Rows [0, n) are the reference group, rows [n, 2n) the target group. Both
// draw features from one uniform [0,1]^dim stream.
Dataset generate_base(const SynthConfig& cfg);

// Relabels the target group with threshold + shift.
BiasedDataset inject_group_bias(const Dataset& base, const SynthConfig& cfg);

// Flips floor(rate * n_target) target-group labels chosen without replacement.
BiasedDataset inject_individual_bias(const Dataset& base, const SynthConfig& cfg);

// Labels under the reference rule: the recorded label with biased entries undone.
std::vector<Label> reference_labels(const BiasedDataset& d);

// Accuracy of (b > 0.5, undefined = unbiased) against the truth, over `target` rows only.
double detection_accuracy(const BiasVector& b, const GroundTruth& truth, std::span<const Group> groups,
                          Group target = kTargetGroup);

std::string format_truth(const GroundTruth& truth);
GroundTruth parse_truth(const std::string& text);

}  // namespace aim::synth
