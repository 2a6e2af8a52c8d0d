#include "agsynth/stats.hpp"

#include <algorithm>
#include <cmath>

#include "agsynth/error.hpp"

namespace agsynth {

double quantile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptyInput, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

OrderStats describe(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "statistics of an empty sample");
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  OrderStats s;
  s.n = values.size();
  s.mean = sum / static_cast<double>(values.size());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_linear(values, 0.25);
  s.median = quantile_linear(values, 0.5);
  s.q3 = quantile_linear(values, 0.75);
  return s;
}

}  // namespace agsynth
