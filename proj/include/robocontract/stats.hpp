#pragma once

#include <cmath>
#include <span>

namespace robocontract {

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and sample (n-1) standard deviation; a single value has std 0.
inline MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return out;
}

}  // namespace robocontract
