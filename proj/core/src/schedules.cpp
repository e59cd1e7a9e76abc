#include "apm/schedules.hpp"

#include <cmath>
#include <limits>

#include "apm/types.hpp"

namespace apm {

double next_theta_nsc(double theta_prev) {
  if (!(theta_prev > 0.0 && theta_prev <= 1.0)) {
    throw InvalidArgument("next_theta_nsc: theta_prev must lie in (0, 1]");
  }
  // theta_prev * (sqrt(p^2 + 4) - p) / 2, rewritten to avoid cancellation
  // once p is small.
  const double p = theta_prev;
  return 2.0 * p / (std::sqrt(p * p + 4.0) + p);
}

double NscThetaSequence::operator()(int k) {
  if (k < 0) throw InvalidArgument("theta index must be non-negative");
  while (static_cast<int>(values_.size()) <= k) values_.push_back(next_theta_nsc(values_.back()));
  return values_[k];
}

int ceil_count(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("ceil_count: non-finite value");
  const double r = std::round(x);
  if (std::abs(x - r) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
    return static_cast<int>(r);
  }
  return static_cast<int>(std::ceil(x));
}

}  // namespace apm
