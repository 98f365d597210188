#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace qsagnac::stats {

// Pairwise summation; result depends only on the order of the input.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

// Two-pass sample mean and (n-1) standard deviation.
inline MeanStd mean_stddev(std::span<const double> x) {
  MeanStd out;
  if (x.empty()) return out;
  out.mean = pairwise_sum(x) / static_cast<double>(x.size());
  if (x.size() < 2) return out;
  // Small scratch-free second pass: accumulate squared deviations pairwise.
  struct Dev {
    static double sum(std::span<const double> v, double m) {
      if (v.size() <= 8) {
        double s = 0.0;
        for (double e : v) s += (e - m) * (e - m);
        return s;
      }
      const std::size_t h = v.size() / 2;
      return sum(v.first(h), m) + sum(v.subspan(h), m);
    }
  };
  out.stddev =
      std::sqrt(Dev::sum(x, out.mean) / static_cast<double>(x.size() - 1));
  return out;
}

}  // namespace qsagnac::stats
