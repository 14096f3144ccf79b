#include <gtest/gtest.h>

#include "aim/errors.hpp"
#include "aim/metrics.hpp"
#include "aim/model.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace aim {
namespace {

DesignMatrix design(RealMatrix values) {
  DesignMatrix x;
  x.values = std::move(values);
  x.columns.resize(x.cols());
  return x;
}

TEST(Train, SeparableTwoPoints) {
  RealMatrix v(2, 1);
  v << 0.0, 1.0;
  const std::vector<Label> y{0, 1};
  const auto x = design(v);
  const auto c = train_classifier(x, y);
  const auto p = predict(c, x);
  EXPECT_EQ(p.labels, y);
  EXPECT_DOUBLE_EQ(accuracy(p.scores, y), 1.0);
}

TEST(Train, UninformativeFeatures) {
  const auto x = design(RealMatrix::Constant(6, 3, 0.4));
  const std::vector<Label> y{0, 1, 0, 1, 0, 1};
  const auto p = predict(train_classifier(x, y), x);
  for (double s : p.scores) EXPECT_NEAR(s, 0.5, 1e-3);
}

TEST(Train, SingleClassRejected) {
  const auto x = design(RealMatrix::Zero(3, 1));
  EXPECT_THROW(train_classifier(x, std::vector<Label>{1, 1, 1}), ValidationError);
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  testing::Rng rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealMatrix x(10, 4);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) = u(rng);
  }
  const auto y = testing::random_labels(rng, 10);
  Eigen::VectorXd theta(5);
  for (Eigen::Index k = 0; k < 5; ++k) theta[k] = u(rng);
  const double l2 = 0.3;
  auto f = [&](const Eigen::VectorXd& t) { return logistic_objective(x, y, t.head(4), t[4], l2).loss; };
  const auto numeric = testing::numeric_gradient(f, theta);
  const auto analytic = logistic_objective(x, y, theta.head(4), theta[4], l2);
  for (Eigen::Index k = 0; k < 4; ++k) {
    EXPECT_NEAR(analytic.weight_gradient[k], numeric[k], 1e-5 * std::max(1.0, std::abs(numeric[k])));
  }
  EXPECT_NEAR(analytic.intercept_gradient, numeric[4], 1e-5 * std::max(1.0, std::abs(numeric[4])));
}

TEST(Predict, ZeroModelThresholdConvention) {
  const Classifier c(Eigen::VectorXd::Zero(2), 0.0, {}, std::nullopt);
  const auto p = predict(c, RealMatrix::Random(4, 2));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(p.scores[i], 0.5);
    EXPECT_EQ(p.labels[i], 1);
  }
}

TEST(Predict, MonotoneInPositiveWeightFeature) {
  Eigen::VectorXd w(2);
  w << 1.5, -0.3;
  const Classifier c(w, 0.1, {}, std::nullopt);
  RealMatrix x(5, 2);
  for (int i = 0; i < 5; ++i) x.row(i) << -1.0 + 0.5 * i, 0.7;
  const auto p = predict(c, x);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_GT(p.scores[i], p.scores[i - 1]);
  EXPECT_THROW(predict(c, RealMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST(Train, DeterministicAndLossDecreasing) {
  testing::Rng rng(18);
  const auto d = testing::random_dataset(rng, {.n = 60, .numerical = 3, .categorical = 2});
  const auto x = encode_features(d);
  const auto a = train_classifier(x, d.labels());
  const auto b = train_classifier(x, d.labels());
  EXPECT_TRUE(a.weights() == b.weights());
  EXPECT_EQ(a.intercept(), b.intercept());
  ASSERT_EQ(a.loss_history().size(), 501u);
  for (std::size_t k = 1; k < a.loss_history().size(); ++k) {
    EXPECT_LE(a.loss_history()[k], a.loss_history()[k - 1]);
  }
  EXPECT_EQ(a.group_column(), x.group_column);
}

TEST(Train, TrainingAccuracyConsistent) {
  testing::Rng rng(19);
  const auto d = testing::random_dataset(rng, {.n = 40, .numerical = 2, .categorical = 1});
  const auto x = encode_features(d);
  const auto c = train_classifier(x, d.labels());
  const auto p = predict(c, x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) correct += p.labels[i] == d.label(i);
  EXPECT_DOUBLE_EQ(accuracy(p.scores, d.labels()), static_cast<double>(correct) / 40.0);
}

TEST(Model, FormatListsWeights) {
  Eigen::VectorXd w(2);
  w << 0.25, -1.0;
  const auto text = format_model(Classifier(w, 0.5, {}, 1));
  EXPECT_NE(text.find("group_column 1"), std::string::npos);
  EXPECT_NE(text.find("intercept 0.5"), std::string::npos);
  EXPECT_NE(text.find("-1\n"), std::string::npos);
}

}  // namespace
}  // namespace aim
