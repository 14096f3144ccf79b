#include "aim/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "aim/errors.hpp"

namespace aim {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -log sigmoid(z) for y = 1, -log(1 - sigmoid(z)) for y = 0.
double log_loss(double z, Label y) {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return softplus - (y == 1 ? z : 0.0);
}

}  // namespace

Classifier::Classifier(Eigen::VectorXd weights, double intercept, TrainingConfig config,
                       std::optional<std::size_t> group_column, std::vector<double> loss_history)
    : weights_(std::move(weights)),
      intercept_(intercept),
      config_(config),
      group_column_(group_column),
      loss_history_(std::move(loss_history)) {
  if (!weights_.allFinite() || !std::isfinite(intercept_)) throw ValidationError("classifier weights must be finite");
}

LossAndGradient logistic_objective(const RealMatrix& x, std::span<const Label> y, const Eigen::VectorXd& w,
                                   double b, double l2) {
  const auto n = x.rows();
  const Eigen::VectorXd z = (x * w).array() + b;
  Eigen::VectorXd residual(n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto yi = y[static_cast<std::size_t>(i)];
    loss += log_loss(z(i), yi);
    residual(i) = sigmoid(z(i)) - static_cast<double>(yi);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  LossAndGradient out;
  out.loss = loss * inv_n + 0.5 * l2 * w.squaredNorm();
  out.weight_gradient = inv_n * (x.transpose() * residual) + l2 * w;
  out.intercept_gradient = residual.sum() * inv_n;
  return out;
}

Classifier train_classifier(const DesignMatrix& x, std::span<const Label> y, const TrainingConfig& config) {
  if (x.rows() != y.size()) throw std::invalid_argument("design matrix rows do not match the label count");
  const auto positives = std::count(y.begin(), y.end(), Label{1});
  if (positives == 0 || static_cast<std::size_t>(positives) == y.size()) {
    throw ValidationError("training labels contain a single class");
  }
  if (config.epochs < 0 || !(config.learning_rate > 0.0) || config.l2 < 0.0) {
    throw std::invalid_argument("invalid training configuration");
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.cols()));
  double b = 0.0;
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(config.epochs) + 1);
  auto step = logistic_objective(x.values, y, w, b, config.l2);
  history.push_back(step.loss);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    w -= config.learning_rate * step.weight_gradient;
    b -= config.learning_rate * step.intercept_gradient;
    step = logistic_objective(x.values, y, w, b, config.l2);
    history.push_back(step.loss);
  }
  return Classifier(std::move(w), b, config, x.group_column, std::move(history));
}

Predictions predict(const Classifier& c, const RealMatrix& x) {
  if (static_cast<std::size_t>(x.cols()) != c.num_inputs()) {
    throw std::invalid_argument(fmt::format("classifier expects {} columns, got {}", c.num_inputs(), x.cols()));
  }
  const Eigen::VectorXd z = (x * c.weights()).array() + c.intercept();
  Predictions out;
  out.scores.resize(static_cast<std::size_t>(z.size()));
  out.labels.resize(out.scores.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double s = sigmoid(z(i));
    out.scores[static_cast<std::size_t>(i)] = s;
    out.labels[static_cast<std::size_t>(i)] = s >= 0.5 ? 1 : 0;
  }
  return out;
}

Predictions predict(const Classifier& c, const DesignMatrix& x) { return predict(c, x.values); }

std::string format_model(const Classifier& c) {
  std::string out;
  out += fmt::format("learning_rate {}\nepochs {}\nl2 {}\nseed {}\n", c.config().learning_rate, c.config().epochs,
                     c.config().l2, c.config().seed);
  out += fmt::format("group_column {}\n", c.group_column() ? std::to_string(*c.group_column()) : "none");
  out += fmt::format("intercept {:.17g}\nweights {}\n", c.intercept(), c.num_inputs());
  for (Eigen::Index k = 0; k < c.weights().size(); ++k) out += fmt::format("{:.17g}\n", c.weights()(k));
  return out;
}

}  // namespace aim
