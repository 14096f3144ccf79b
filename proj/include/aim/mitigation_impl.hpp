#pragma once

#include <algorithm>
#include <random>

namespace aim {

template <class Rng>
SyntheticSample mix_pair(const Dataset& d, std::size_t seed, std::size_t target, double lambda, Rng& rng) {
  SyntheticSample s;
  s.seed_index = seed;
  s.target_index = target;
  s.lambda = lambda;
  s.label = d.label(seed);
  s.group = d.group(seed);
  const auto rs = d.numerical_row(seed);
  const auto rt = d.numerical_row(target);
  s.numericals.resize(rs.size());
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const double v = lambda * rs[k] + (1.0 - lambda) * rt[k];
    s.numericals[k] = std::clamp(v, std::min(rs[k], rt[k]), std::max(rs[k], rt[k]));
  }
  const auto ds = d.categorical_row(seed);
  const auto dt = d.categorical_row(target);
  s.categoricals.resize(ds.size());
  std::bernoulli_distribution from_seed(lambda);
  for (std::size_t k = 0; k < ds.size(); ++k) s.categoricals[k] = from_seed(rng) ? ds[k] : dt[k];
  return s;
}

}  // namespace aim
