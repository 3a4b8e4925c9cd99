#include "stubborn/statistics.hpp"

#include <cmath>

namespace stubborn {

double MonteCarloEstimate::z_score(double expected) const {
  const double gap = mean - expected;
  if (std_error > 0.0) return gap / std_error;
  if (gap == 0.0) return 0.0;
  return gap > 0.0 ? INFINITY : -INFINITY;
}

}  // namespace stubborn
