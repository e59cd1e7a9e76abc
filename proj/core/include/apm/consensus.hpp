#pragma once

#include "apm/network.hpp"
#include "apm/types.hpp"

namespace apm {

/// Momentum of the accelerated consensus recursion,
/// eta = (1 - sqrt(1 - s^2)) / (1 + sqrt(1 - s^2)) for s = sigma2.
double consensus_momentum(double sigma2);

/// Per-iteration contraction factor s / (1 + sqrt(1 - s^2)).
double consensus_contraction(double sigma2);

struct ConsensusParams {
  double eta = 0.0;
  const WeightMatrix* weights = nullptr;

  static ConsensusParams for_matrix(const WeightMatrix& w) {
    return {consensus_momentum(w.sigma2()), &w};
  }
};

/// Runs z^{t+1} = (1 + eta) W z^t - eta z^{t-1} from z^0 = z^{-1} = z for
/// exactly `iterations` steps. Adds `iterations` communications.
AgentMatrix accelerated_consensus(const ConsensusParams& params, const AgentMatrix& z,
                                  int iterations, Counters& counters);

/// Number of consensus rounds so that the inexact proximal step is
/// eps-accurate:
///
///   ceil( log(beta0 * ||Pi z||^2 / (2 theta_pen eps)) / (-2 log(1 - sqrt(1 - sigma2))) )
///
/// clamped below at zero. sigma2 = 0 (complete mixing) gives zero.
/// Throws InvalidGap when sigma2 is outside [0, 1).
int required_inner_iters(double beta0, double theta_pen, double eps, double pi_norm_sq,
                         double sigma2);

}  // namespace apm
