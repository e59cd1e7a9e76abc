#pragma once

#include <vector>

namespace apm {

/// Positive root of t^2 + p^2 t - p^2 = 0 for p = theta_prev, i.e. the theta
/// satisfying (1 - theta)/theta^2 = 1/theta_prev^2.
double next_theta_nsc(double theta_prev);

/// theta_0 = 1, theta_k = next_theta_nsc(theta_{k-1}), computed on demand and
/// memoized.
class NscThetaSequence {
 public:
  double operator()(int k);

 private:
  std::vector<double> values_{1.0};
};

/// ceil(x) that treats values within a few ulps above an integer as that
/// integer, so ceil(300 * 0.04) is 12 and not 13.
int ceil_count(double x);

}  // namespace apm
