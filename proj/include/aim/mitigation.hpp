#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "aim/attribution.hpp"
#include "aim/dataset.hpp"
#include "aim/similarity.hpp"

namespace aim {

enum class EditStrategy { removal, augmentation };

// The (label, group) cell an edit is drawn from.
struct SubgroupSelector {
  Label target_label = 0;
  Group target_group = 0;
  EditStrategy strategy = EditStrategy::removal;

  bool matches(const Dataset& d, std::size_t i) const {
    return d.label(i) == target_label && d.group(i) == target_group;
  }
};

// Removal edits the majority class: privileged group (1) when the majority is
// positive, protected group (0) otherwise. Augmentation edits the minority
// class: protected group when the minority is positive, privileged otherwise.
// `majority_override` names the majority label when the labels are tied;
// without it a tie throws ClassTieError.
SubgroupSelector select_edit_subgroup(const Dataset& d, EditStrategy strategy,
                                      std::optional<Label> majority_override = std::nullopt);

struct RemovalPlan {
  std::vector<std::size_t> indices;
  std::size_t budget = 0;
  std::optional<SubgroupSelector> selector;  // empty for the random control
};

// Top-`budget` candidates by bias (undefined ranks as 0), ties by index.
RemovalPlan plan_removal(const Dataset& d, const BiasVector& b, std::size_t budget,
                         std::optional<Label> majority_override = std::nullopt);

// Control arm: `count` rows drawn uniformly without replacement from the whole dataset.
RemovalPlan plan_random_removal(const Dataset& d, std::size_t count, std::uint64_t seed);

struct SyntheticSample {
  std::vector<double> numericals;
  std::vector<CategoryCode> categoricals;
  Label label = 0;
  Group group = 0;
  std::size_t seed_index = 0;
  std::size_t target_index = 0;
  double lambda = 0.0;
};

struct AugmentationPlan {
  std::vector<SyntheticSample> samples;
  std::size_t budget = 0;
  std::size_t neighbors = 0;
  SubgroupSelector selector;
};

struct AugmentationOptions {
  std::size_t budget = 0;
  std::size_t neighbors = 5;
  std::uint64_t seed = 0;
  std::optional<Label> majority_override;
};

// Neighborhood mixup. Seeds are drawn with replacement with weight 1 - b
// (undefined b counts as 0); the target is drawn uniformly from the seed's
// `neighbors` most similar same-group, same-label samples with Q > 0.
AugmentationPlan synthesize_fair_samples(const Dataset& d, const BiasVector& b, const SimilarityMatrix& q,
                                         const AugmentationOptions& options);

// Mixes one pair. Numericals interpolate linearly and stay inside the
// seed/target box; each categorical comes from the seed with probability lambda.
template <class Rng>
SyntheticSample mix_pair(const Dataset& d, std::size_t seed, std::size_t target, double lambda, Rng& rng);

// Rows deleted, survivors keep their relative order.
Dataset apply_plan(const Dataset& d, const RemovalPlan& plan);
// Synthetic rows appended after the originals.
Dataset apply_plan(const Dataset& d, const AugmentationPlan& plan);

}  // namespace aim

#include "aim/mitigation_impl.hpp"
