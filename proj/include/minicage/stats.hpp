#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace minicage {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double sample_stdev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  double m = mean(x), ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline double standard_error(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("standard error of empty sample");
  return sample_stdev(x) / std::sqrt(static_cast<double>(x.size()));
}

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;  // two-sided
};

class DegenerateSample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pearson r with a two-sided p-value from Student's t on n - 2 degrees of
/// freedom, t = r * sqrt((n - 2) / (1 - r^2)).
inline PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 3) throw std::invalid_argument("pearson: need at least 3 points");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateSample("pearson: zero variance");
  double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

  const double df = static_cast<double>(x.size() - 2);
  PearsonResult out{r, 0.0};
  if (std::abs(r) < 1.0) {
    double t = r * std::sqrt(df / (1.0 - r * r));
    boost::math::students_t dist(df);
    out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return out;
}

}  // namespace minicage
