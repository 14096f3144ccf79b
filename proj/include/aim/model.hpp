#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aim/dataset.hpp"

namespace aim {

struct TrainingConfig {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;  // recorded only; initialization is zero
};

// L2-regularized logistic regression. Decision threshold is score >= 0.5.
class Classifier {
 public:
  Classifier() = default;
  Classifier(Eigen::VectorXd weights, double intercept, TrainingConfig config,
             std::optional<std::size_t> group_column, std::vector<double> loss_history = {});

  const Eigen::VectorXd& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  const TrainingConfig& config() const { return config_; }
  std::optional<std::size_t> group_column() const { return group_column_; }
  // Training loss before the first step and after every epoch.
  const std::vector<double>& loss_history() const { return loss_history_; }
  std::size_t num_inputs() const { return static_cast<std::size_t>(weights_.size()); }

 private:
  Eigen::VectorXd weights_;
  double intercept_ = 0.0;
  TrainingConfig config_;
  std::optional<std::size_t> group_column_;
  std::vector<double> loss_history_;
};

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd weight_gradient;
  double intercept_gradient = 0.0;
};

// Mean cross-entropy plus (l2 / 2) * |w|^2 (intercept unregularized).
LossAndGradient logistic_objective(const RealMatrix& x, std::span<const Label> y, const Eigen::VectorXd& w,
                                   double b, double l2);

// Full-batch gradient descent from zero. Throws ValidationError on single-class labels.
Classifier train_classifier(const DesignMatrix& x, std::span<const Label> y, const TrainingConfig& config = {});

struct Predictions {
  std::vector<double> scores;
  std::vector<Label> labels;
};

Predictions predict(const Classifier& c, const DesignMatrix& x);
Predictions predict(const Classifier& c, const RealMatrix& x);

// Plain-text dump: config, intercept and one weight per line.
std::string format_model(const Classifier& c);

}  // namespace aim
