#include "apm/consensus.hpp"

#include <cmath>
#include <limits>

namespace apm {

double consensus_momentum(double sigma2) {
  const double s = std::sqrt(std::max(0.0, 1.0 - sigma2 * sigma2));
  return (1.0 - s) / (1.0 + s);
}

double consensus_contraction(double sigma2) {
  return sigma2 / (1.0 + std::sqrt(std::max(0.0, 1.0 - sigma2 * sigma2)));
}

AgentMatrix accelerated_consensus(const ConsensusParams& params, const AgentMatrix& z,
                                  int iterations, Counters& counters) {
  if (iterations < 0) throw InvalidArgument("accelerated_consensus: negative iteration count");
  if (iterations == 0) return z;
  if (params.weights == nullptr) throw InvalidArgument("accelerated_consensus: no weight matrix");
  const WeightMatrix& w = *params.weights;
  const double eta = params.eta;

  AgentMatrix prev = z;
  AgentMatrix cur = z;
  AgentMatrix next(z.rows(), z.cols());
  for (int t = 0; t < iterations; ++t) {
    next.noalias() = (1.0 + eta) * (w.sparse() * cur);
    next -= eta * prev;
    prev.swap(cur);
    cur.swap(next);
  }
  counters.communications += static_cast<std::uint64_t>(iterations);
  return cur;
}

int required_inner_iters(double beta0, double theta_pen, double eps, double pi_norm_sq,
                         double sigma2) {
  if (!(sigma2 >= 0.0 && sigma2 < 1.0)) throw InvalidGap("required_inner_iters: sigma2 must lie in [0, 1)");
  if (!(beta0 > 0.0 && theta_pen > 0.0 && eps > 0.0)) {
    throw InvalidArgument("required_inner_iters: beta0, theta_pen and eps must be positive");
  }
  if (sigma2 == 0.0 || pi_norm_sq <= 0.0) return 0;
  const double ratio = beta0 * pi_norm_sq / (2.0 * theta_pen * eps);
  if (ratio <= 1.0) return 0;
  const double rate = 1.0 - std::sqrt(1.0 - sigma2);
  const double value = std::log(ratio) / (-2.0 * std::log(rate));
  if (!(value < static_cast<double>(std::numeric_limits<int>::max()))) {
    throw InvalidArgument("required_inner_iters: count overflows");
  }
  return static_cast<int>(std::ceil(value));
}

}  // namespace apm
