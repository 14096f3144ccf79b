#include "aim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "aim/errors.hpp"

namespace aim {
namespace {

struct Rate {
  std::size_t hits = 0;
  std::size_t total = 0;
  double value() const { return static_cast<double>(hits) / static_cast<double>(total); }
};

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("metric inputs have different lengths");
}

void require_both_classes(std::span<const Label> truth) {
  const auto pos = std::count(truth.begin(), truth.end(), Label{1});
  if (pos == 0 || static_cast<std::size_t>(pos) == truth.size()) {
    throw ValidationError("ranking metrics need both classes present");
  }
}

}  // namespace

double demographic_parity(std::span<const Label> predicted, std::span<const Group> groups) {
  require_same_size(predicted.size(), groups.size());
  std::array<Rate, 2> rate{};
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++rate[groups[i]].total;
    rate[groups[i]].hits += predicted[i];
  }
  for (int g = 0; g < 2; ++g) {
    if (rate[g].total == 0) throw ValidationError(fmt::format("group {} is absent", g));
  }
  return std::abs(rate[1].value() - rate[0].value());
}

double equalized_odds(std::span<const Label> predicted, std::span<const Label> truth,
                      std::span<const Group> groups, OddsReduction reduction) {
  require_same_size(predicted.size(), truth.size());
  require_same_size(predicted.size(), groups.size());
  // cell[g][y]: positive-prediction rate among samples of group g with label y.
  std::array<std::array<Rate, 2>, 2> cell{};
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    auto& r = cell[groups[i]][truth[i]];
    ++r.total;
    r.hits += predicted[i];
  }
  for (int g = 0; g < 2; ++g) {
    for (int y = 0; y < 2; ++y) {
      if (cell[g][y].total == 0) throw ValidationError(fmt::format("cell (group={}, label={}) is empty", g, y));
    }
  }
  const double tpr_gap = std::abs(cell[1][1].value() - cell[0][1].value());
  const double fpr_gap = std::abs(cell[1][0].value() - cell[0][0].value());
  return reduction == OddsReduction::mean ? 0.5 * (tpr_gap + fpr_gap) : std::max(tpr_gap, fpr_gap);
}

double prediction_consistency(const Classifier& c, const DesignMatrix& x) {
  const auto col = c.group_column();
  if (!col || !x.group_column || *x.group_column != *col) {
    throw ValidationError("prediction consistency needs a model trained with the group column");
  }
  if (x.rows() == 0) throw ValidationError("prediction consistency needs at least one sample");
  RealMatrix flipped = x.values;
  const auto k = static_cast<Eigen::Index>(*col);
  flipped.col(k) = (1.0 - flipped.col(k).array()).matrix();
  const auto original = predict(c, x.values);
  const auto counterfactual = predict(c, flipped);
  std::size_t same = 0;
  for (std::size_t i = 0; i < original.labels.size(); ++i) same += original.labels[i] == counterfactual.labels[i];
  return static_cast<double>(same) / static_cast<double>(original.labels.size());
}

double prediction_consistency(const Classifier& c, const Dataset& d) {
  return prediction_consistency(c, encode_features(d, {.include_group = true}));
}

double generalized_entropy_of_benefits(std::span<const double> benefits) {
  if (benefits.empty()) throw ValidationError("generalized entropy needs at least one sample");
  const double n = static_cast<double>(benefits.size());
  const double mu = std::accumulate(benefits.begin(), benefits.end(), 0.0) / n;
  if (mu == 0.0) return 0.0;
  double sum = 0.0;
  for (double b : benefits) {
    const double r = b / mu;
    sum += r * r - 1.0;
  }
  return sum / (2.0 * n);
}

double generalized_entropy(std::span<const Label> predicted, std::span<const Label> truth) {
  require_same_size(predicted.size(), truth.size());
  std::vector<double> benefits(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    benefits[i] = static_cast<double>(predicted[i]) - static_cast<double>(truth[i]) + 1.0;
  }
  return generalized_entropy_of_benefits(benefits);
}

double accuracy(std::span<const double> scores, std::span<const Label> truth) {
  require_same_size(scores.size(), truth.size());
  if (scores.empty()) throw ValidationError("accuracy needs at least one sample");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) correct += (scores[i] >= 0.5 ? 1 : 0) == truth[i];
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

double roc_auc(std::span<const double> scores, std::span<const Label> truth) {
  require_same_size(scores.size(), truth.size());
  require_both_classes(truth);
  const auto n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Midranks (1-based) summed over positives.
  double positive_rank_sum = 0.0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
    const double midrank = 0.5 * static_cast<double>(lo + hi) + 1.0;
    for (std::size_t k = lo; k <= hi; ++k) positive_rank_sum += truth[order[k]] ? midrank : 0.0;
    lo = hi + 1;
  }
  const double pos = static_cast<double>(std::count(truth.begin(), truth.end(), Label{1}));
  const double neg = static_cast<double>(n) - pos;
  return (positive_rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double average_precision(std::span<const double> scores, std::span<const Label> truth) {
  require_same_size(scores.size(), truth.size());
  require_both_classes(truth);
  const auto n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double pos = static_cast<double>(std::count(truth.begin(), truth.end(), Label{1}));
  double tp = 0.0, fp = 0.0, ap = 0.0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
    double new_tp = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
      if (truth[order[k]]) {
        new_tp += 1.0;
      } else {
        fp += 1.0;
      }
    }
    tp += new_tp;
    if (new_tp > 0.0) ap += (new_tp / pos) * (tp / (tp + fp));
    lo = hi + 1;
  }
  return ap;
}

UtilityMetrics utility_metrics(std::span<const double> scores, std::span<const Label> truth) {
  UtilityMetrics out;
  out.acc = accuracy(scores, truth);
  const auto pos = std::count(truth.begin(), truth.end(), Label{1});
  if (pos > 0 && static_cast<std::size_t>(pos) < truth.size()) {
    out.roc_auc = roc_auc(scores, truth);
    out.ap = average_precision(scores, truth);
  }
  return out;
}

EvaluationResult evaluate(const Classifier& c, const DesignMatrix& x, std::span<const Label> truth,
                          std::span<const Group> groups, OddsReduction reduction) {
  require_same_size(x.rows(), truth.size());
  require_same_size(x.rows(), groups.size());
  const auto pred = predict(c, x);
  EvaluationResult r;
  const auto u = utility_metrics(pred.scores, truth);
  r.acc = u.acc;
  r.roc_auc = u.roc_auc;
  r.ap = u.ap;
  r.dp = demographic_parity(pred.labels, groups);
  r.eo = equalized_odds(pred.labels, truth, groups, reduction);
  if (c.group_column() && x.group_column) r.pc = prediction_consistency(c, x);
  r.ge = generalized_entropy(pred.labels, truth);
  std::array<Rate, 2> positive{}, tp{}, fp{};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto g = groups[i];
    ++positive[g].total;
    positive[g].hits += pred.labels[i];
    auto& cell = truth[i] ? tp[g] : fp[g];
    ++cell.total;
    cell.hits += pred.labels[i];
  }
  for (int g = 0; g < 2; ++g) {
    r.group_size[g] = positive[g].total;
    r.positive_rate[g] = positive[g].value();
    r.tpr[g] = tp[g].value();
    r.fpr[g] = fp[g].value();
  }
  return r;
}

}  // namespace aim
