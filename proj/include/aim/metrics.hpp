#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

#include "aim/dataset.hpp"
#include "aim/model.hpp"

namespace aim {

// |P(yhat=1 | s=1) - P(yhat=1 | s=0)|
double demographic_parity(std::span<const Label> predicted, std::span<const Group> groups);

// How the TPR and FPR gaps are combined into one number.
enum class OddsReduction { mean, max };

double equalized_odds(std::span<const Label> predicted, std::span<const Label> truth,
                      std::span<const Group> groups, OddsReduction reduction = OddsReduction::mean);

// Fraction of rows whose predicted label survives flipping the group column.
double prediction_consistency(const Classifier& c, const DesignMatrix& x);
double prediction_consistency(const Classifier& c, const Dataset& d);

// Inequality index with alpha = 2 over benefits b_i = yhat_i - y_i + 1.
double generalized_entropy(std::span<const Label> predicted, std::span<const Label> truth);
double generalized_entropy_of_benefits(std::span<const double> benefits);

double accuracy(std::span<const double> scores, std::span<const Label> truth);
// Rank statistic with ties counted half. Throws ValidationError on single-class labels.
double roc_auc(std::span<const double> scores, std::span<const Label> truth);
// Sum over distinct thresholds of (recall step) x precision. Throws on single-class labels.
double average_precision(std::span<const double> scores, std::span<const Label> truth);

struct UtilityMetrics {
  double acc = 0.0;
  std::optional<double> roc_auc;
  std::optional<double> ap;
};

UtilityMetrics utility_metrics(std::span<const double> scores, std::span<const Label> truth);

struct EvaluationResult {
  double acc = 0.0;
  std::optional<double> roc_auc;
  std::optional<double> ap;
  double dp = 0.0;
  double eo = 0.0;
  std::optional<double> pc;
  double ge = 0.0;
  std::array<std::size_t, 2> group_size{};
  std::array<double, 2> positive_rate{};
  std::array<double, 2> tpr{};
  std::array<double, 2> fpr{};
};

// Scores `c` on `x`/`groups` against `truth`.
EvaluationResult evaluate(const Classifier& c, const DesignMatrix& x, std::span<const Label> truth,
                          std::span<const Group> groups, OddsReduction reduction = OddsReduction::mean);

}  // namespace aim
