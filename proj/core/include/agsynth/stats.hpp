#pragma once

#include <span>
#include <vector>

namespace agsynth {

/// Quantile by linear interpolation between order statistics: with
/// h = (n - 1) p, Q(p) = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// `sorted` must be ascending and non-empty.
double quantile_linear(std::span<const double> sorted, double p);

struct OrderStats {
  double mean = 0, min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  std::size_t n = 0;

  friend bool operator==(const OrderStats&, const OrderStats&) = default;
};

/// Throws EmptyInput for an empty sample. The mean is summed in sorted
/// order, so the result does not depend on input order.
OrderStats describe(std::vector<double> values);

}  // namespace agsynth
