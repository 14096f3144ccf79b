#include "aim/attribution.hpp"

#include <algorithm>

#include "aim/errors.hpp"
#include "aim/kernels/kernels.hpp"

namespace aim {
namespace {

void check_aligned(const Dataset& d, const SimilarityMatrix& q) {
  if (q.size() != d.size()) throw std::invalid_argument("similarity matrix was not built over this dataset");
}

std::vector<Estimate> ratios(const kernels::RatioSums& sums) {
  std::vector<Estimate> out(sums.numerator.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (sums.denominator[i] > 0.0) out[i] = std::min(1.0, sums.numerator[i] / sums.denominator[i]);
  }
  return out;
}

}  // namespace

CredibilityVector estimate_credibility(const Dataset& d, const SimilarityMatrix& q, Execution execution) {
  check_aligned(d, q);
  const auto sums = execution == Execution::serial
                        ? kernels::serial::credibility_sums(d.labels(), d.groups(), q)
                        : kernels::omp::credibility_sums(d.labels(), d.groups(), q);
  return {ratios(sums)};
}

BiasVector estimate_bias(const Dataset& d, const SimilarityMatrix& q, const CredibilityVector& c,
                         Execution execution) {
  check_aligned(d, q);
  if (c.size() != d.size()) throw std::invalid_argument("credibility vector does not match the dataset");
  std::vector<double> weight(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) weight[j] = c.weight(j);
  const auto sums = execution == Execution::serial
                        ? kernels::serial::bias_sums(d.labels(), d.groups(), weight, q)
                        : kernels::omp::bias_sums(d.labels(), d.groups(), weight, q);
  return {ratios(sums)};
}

std::vector<Explanation> all_contributions(const Dataset& d, const SimilarityMatrix& q,
                                           const CredibilityVector& c, std::size_t i) {
  check_aligned(d, q);
  if (i >= d.size()) throw std::out_of_range("sample index out of range");
  const auto row = q.row(i);
  double denominator = 0.0;
  std::vector<Explanation> out;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d.group(j) == d.group(i)) continue;
    const double w = c.weight(j) * row[j];
    denominator += w;
    if (w > 0.0) out.push_back({j, d.label(j) != d.label(i) ? w : 0.0, c.weight(j), row[j]});
  }
  if (!(denominator > 0.0)) throw UndefinedBiasError();
  for (auto& e : out) e.contribution /= denominator;
  std::stable_sort(out.begin(), out.end(),
                   [](const Explanation& a, const Explanation& b) { return a.contribution > b.contribution; });
  return out;
}

std::vector<Explanation> bias_contributions(const Dataset& d, const SimilarityMatrix& q,
                                            const CredibilityVector& c, std::size_t i, std::size_t k) {
  auto out = all_contributions(d, q, c, i);
  if (out.size() > k) out.resize(k);
  return out;
}

std::size_t BiasReport::num_defined_bias() const {
  return static_cast<std::size_t>(std::count_if(bias.values.begin(), bias.values.end(),
                                                [](const Estimate& e) { return e.has_value(); }));
}

std::size_t BiasReport::num_biased() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < bias.size(); ++i) count += bias.biased(i) ? 1 : 0;
  return count;
}

SimilarityMatrix compute_similarity(const Dataset& d, const AttributionOptions& options) {
  const auto graph = build_comparability_graph(d, options.comparability, options.graph);
  if (options.similarity == SimilarityMode::adjacency) return adjacency_similarity(graph);
  return rwr_proximity(symmetric_normalize(graph), options.damping, options.rwr);
}

BiasReport attribute(const Dataset& d, const SimilarityMatrix& q, const AttributionOptions& options) {
  BiasReport report;
  report.credibility = estimate_credibility(d, q, options.execution);
  report.bias = estimate_bias(d, q, report.credibility, options.execution);
  report.records.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto& r = report.records[i];
    r.index = i;
    r.group = d.group(i);
    r.label = d.label(i);
    r.credibility = report.credibility.values[i];
    r.bias = report.bias.values[i];
    if (r.bias && options.top_k > 0) r.explanations = bias_contributions(d, q, report.credibility, i, options.top_k);
  }
  return report;
}

BiasReport attribute(const Dataset& d, const AttributionOptions& options) {
  return attribute(d, compute_similarity(d, options), options);
}

BiasReport attribute(const Dataset& d, const ComparabilityConfig& cfg, double damping) {
  AttributionOptions options;
  options.comparability = cfg;
  options.damping = damping;
  return attribute(d, options);
}

}  // namespace aim
