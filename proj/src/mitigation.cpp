#include "aim/mitigation.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "aim/diagnostics.hpp"
#include "aim/errors.hpp"

namespace aim {

SubgroupSelector select_edit_subgroup(const Dataset& d, EditStrategy strategy,
                                      std::optional<Label> majority_override) {
  const auto positives = static_cast<std::size_t>(std::count(d.labels().begin(), d.labels().end(), Label{1}));
  const auto negatives = d.size() - positives;
  if (positives == 0 || negatives == 0) throw ValidationError("both labels must be present to select an edit subgroup");
  Label majority = positives > negatives ? 1 : 0;
  if (positives == negatives) {
    if (!majority_override) {
      throw ClassTieError(fmt::format("labels are exactly balanced ({} each); pass an explicit majority label",
                                      positives));
    }
    majority = *majority_override;
  }
  SubgroupSelector s;
  s.strategy = strategy;
  if (strategy == EditStrategy::removal) {
    s.target_label = majority;
    s.target_group = majority == 1 ? 1 : 0;
  } else {
    s.target_label = majority == 1 ? 0 : 1;
    s.target_group = s.target_label == 1 ? 0 : 1;
  }
  return s;
}

RemovalPlan plan_removal(const Dataset& d, const BiasVector& b, std::size_t budget,
                         std::optional<Label> majority_override) {
  if (b.size() != d.size()) throw std::invalid_argument("bias vector does not match the dataset");
  RemovalPlan plan;
  plan.budget = budget;
  plan.selector = select_edit_subgroup(d, EditStrategy::removal, majority_override);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (plan.selector->matches(d, i)) candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t x, std::size_t y) { return b.score(x) > b.score(y); });
  if (budget > candidates.size()) {
    diag::warn(fmt::format("removal budget {} exceeds the {} candidates in the (label={}, group={}) cell",
                           budget, candidates.size(), plan.selector->target_label, plan.selector->target_group));
  }
  candidates.resize(std::min(budget, candidates.size()));
  plan.indices = std::move(candidates);
  return plan;
}

RemovalPlan plan_random_removal(const Dataset& d, std::size_t count, std::uint64_t seed) {
  RemovalPlan plan;
  plan.budget = count;
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(count, all.size()));
  plan.indices = std::move(all);
  return plan;
}

AugmentationPlan synthesize_fair_samples(const Dataset& d, const BiasVector& b, const SimilarityMatrix& q,
                                         const AugmentationOptions& options) {
  if (b.size() != d.size() || q.size() != d.size()) {
    throw std::invalid_argument("bias vector or similarity matrix does not match the dataset");
  }
  if (options.neighbors == 0) throw std::invalid_argument("neighborhood size must be at least 1");

  AugmentationPlan plan;
  plan.budget = options.budget;
  plan.neighbors = options.neighbors;
  plan.selector = select_edit_subgroup(d, EditStrategy::augmentation, options.majority_override);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (plan.selector.matches(d, i)) candidates.push_back(i);
  }
  if (candidates.empty()) throw ValidationError("augmentation candidate pool is empty");
  std::vector<double> weights(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) weights[k] = 1.0 - b.score(candidates[k]);
  auto any_weight = [&] { return std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; }); };
  if (!any_weight()) throw ValidationError("every augmentation candidate has bias 1; no seed can be drawn");
  if (options.budget == 0) return plan;

  std::vector<std::optional<std::vector<std::size_t>>> pools(candidates.size());
  auto pool_of = [&](std::size_t k) -> const std::vector<std::size_t>& {
    if (!pools[k]) {
      const auto seed = candidates[k];
      const auto row = q.row(seed);
      std::vector<std::size_t> pool;
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (j != seed && d.group(j) == d.group(seed) && d.label(j) == d.label(seed) && row[j] > 0.0) {
          pool.push_back(j);
        }
      }
      std::stable_sort(pool.begin(), pool.end(), [&](std::size_t x, std::size_t y) { return row[x] > row[y]; });
      if (pool.size() > options.neighbors) pool.resize(options.neighbors);
      pools[k] = std::move(pool);
    }
    return *pools[k];
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::discrete_distribution<std::size_t> pick_seed(weights.begin(), weights.end());
  plan.samples.reserve(options.budget);
  while (plan.samples.size() < options.budget) {
    const auto k = pick_seed(rng);
    const auto& pool = pool_of(k);
    if (pool.empty()) {
      diag::warn(fmt::format("seed {} has no same-group same-label neighbor with positive similarity; resampling",
                             candidates[k]));
      weights[k] = 0.0;
      if (!any_weight()) throw ValidationError("no augmentation seed has a usable mixup neighbor");
      pick_seed = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
      continue;
    }
    const auto target = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    const double lambda = unit(rng);
    plan.samples.push_back(mix_pair(d, candidates[k], target, lambda, rng));
  }
  return plan;
}

Dataset apply_plan(const Dataset& d, const RemovalPlan& plan) {
  std::vector<char> drop(d.size(), 0);
  for (auto i : plan.indices) {
    if (i >= d.size()) throw std::out_of_range(fmt::format("removal index {} out of range (n = {})", i, d.size()));
    if (drop[i]) throw std::invalid_argument(fmt::format("removal index {} listed twice", i));
    drop[i] = 1;
  }
  std::vector<std::size_t> keep;
  keep.reserve(d.size() - plan.indices.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!drop[i]) keep.push_back(i);
  }
  return d.subset(keep);
}

Dataset apply_plan(const Dataset& d, const AugmentationPlan& plan) {
  const auto n = static_cast<Eigen::Index>(d.size());
  const auto m = static_cast<Eigen::Index>(plan.samples.size());
  RealMatrix num(n + m, static_cast<Eigen::Index>(d.num_numerical()));
  CodeMatrix cat(n + m, static_cast<Eigen::Index>(d.num_categorical()));
  if (n > 0) {
    num.topRows(n) = d.numericals();
    cat.topRows(n) = d.categoricals();
  }
  auto labels = d.labels();
  auto groups = d.groups();
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& s = plan.samples[static_cast<std::size_t>(k)];
    if (s.numericals.size() != d.num_numerical() || s.categoricals.size() != d.num_categorical()) {
      throw std::invalid_argument("synthetic sample does not match the dataset schema");
    }
    if (s.seed_index >= d.size() || s.target_index >= d.size()) {
      throw std::out_of_range("synthetic sample provenance index out of range");
    }
    for (std::size_t f = 0; f < s.numericals.size(); ++f) num(n + k, static_cast<Eigen::Index>(f)) = s.numericals[f];
    for (std::size_t f = 0; f < s.categoricals.size(); ++f) cat(n + k, static_cast<Eigen::Index>(f)) = s.categoricals[f];
    labels.push_back(s.label);
    groups.push_back(s.group);
  }
  return Dataset(d.schema(), std::move(num), std::move(cat), std::move(labels), std::move(groups),
                 d.category_names(), d.label_tokens(), d.group_tokens());
}

}  // namespace aim
