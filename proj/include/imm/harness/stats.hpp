#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace imm::stats {

struct Interval {
  double lo = 0;
  double hi = 1;
};

// Wilson score interval for a binomial proportion. With fewer than two
// trials nothing is resolvable and the whole of [0,1] is returned.
inline Interval wilson(std::size_t successes, std::size_t trials, double z = 1.959963984540054) {
  if (trials < 2) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct Summary {
  std::size_t count = 0;
  double mean = 0;
  double sd = 0;       // sample standard deviation
  double std_err = 0;  // sd / sqrt(count)
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  // Two-pass; inputs are at most a few thousand values.
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
    s.std_err = s.sd / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

// Welch two-sample t statistic; empty when either side has < 2 samples or
// both variances vanish.
inline std::optional<double> welch_t(const Summary& a, const Summary& b) {
  if (a.count < 2 || b.count < 2) return std::nullopt;
  const double se = std::sqrt(a.sd * a.sd / static_cast<double>(a.count) + b.sd * b.sd / static_cast<double>(b.count));
  if (se == 0.0) return std::nullopt;
  return (a.mean - b.mean) / se;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
  std::nth_element(xs.begin(), mid, xs.end());
  if (xs.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(xs.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace imm::stats
