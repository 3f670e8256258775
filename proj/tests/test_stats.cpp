#include <gtest/gtest.h>

#include <numbers>

#include "minicage/stats.hpp"
#include "stats_reference.hpp"

using namespace minicage;

TEST(Stats, MeanAndStandardError) {
  std::vector<double> x{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(mean(x), 2.5);
  EXPECT_DOUBLE_EQ(sample_stdev(x), std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(standard_error(x), std::sqrt(5.0 / 3.0) / 2.0);
  std::vector<double> one{7};
  EXPECT_EQ(standard_error(one), 0.0);
  EXPECT_THROW(mean(std::vector<double>{}), std::invalid_argument);
}

TEST(Pearson, Anchors) {
  std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  EXPECT_EQ(pearson(a, a).r, 1.0);
  EXPECT_EQ(pearson(a, b).r, -1.0);
  EXPECT_EQ(pearson(a, a).p, 0.0);
}

// For two degrees of freedom the two-sided t tail is 1 - |t| / sqrt(t^2 + 2).
TEST(Pearson, FourPointCase) {
  std::vector<double> x{1, 2, 3, 4}, y{2, 1, 4, 3};
  auto r = pearson(x, y);
  EXPECT_NEAR(r.r, 0.6, 1e-15);
  const double t = 0.6 * std::sqrt(2.0 / (1.0 - 0.36));
  EXPECT_NEAR(r.p, 1.0 - t / std::sqrt(t * t + 2.0), 1e-12);
  EXPECT_NEAR(r.p, 0.4, 1e-12);
}

// One degree of freedom: Cauchy tail, p = 1 - (2/pi) atan|t|.
TEST(Pearson, ThreePointPValue) {
  std::vector<double> x{1, 2, 3}, y{1, 3, 2};
  auto r = pearson(x, y);
  EXPECT_NEAR(r.r, 0.5, 1e-15);
  const double t = 0.5 * std::sqrt(1.0 / 0.75);
  EXPECT_NEAR(r.p, 1.0 - 2.0 / std::numbers::pi * std::atan(t), 1e-12);
}

TEST(Pearson, MatchesBruteForce) {
  double worst = testing_support::worst_pearson_error(
      [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y).r; }, 1000, 42);
  EXPECT_LT(worst, 1e-12);
}

TEST(Pearson, Errors) {
  std::vector<double> a{1, 2, 3}, c{5, 5, 5};
  EXPECT_THROW(pearson(a, c), DegenerateSample);
  EXPECT_THROW(pearson(a, std::vector<double>{1, 2}), std::invalid_argument);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{2, 1}), std::invalid_argument);
}

TEST(Pearson, RangeAndSignOnRandomData) {
  std::vector<double> x(50), y(50);
  for (int i = 0; i < 50; ++i) {
    x[i] = std::sin(i * 1.3);
    y[i] = -2 * x[i] + 0.1 * std::cos(i * 7.1);
  }
  auto r = pearson(x, y);
  EXPECT_LT(r.r, -0.9);
  EXPECT_GE(r.r, -1.0);
  EXPECT_LT(r.p, 0.01);
}
