#pragma once

#include "apm/network.hpp"
#include "apm/problems.hpp"
#include "apm/trace.hpp"

namespace apm {

/// Parameters of the accelerated penalty method for nonsmooth objectives.
///
/// theta_k = vartheta_k = 1/(k+1), penalty beta0 (k+1).
/// FixedHorizon: T_k = ceil(K gap), eta_k = eta_scale theta_k / (K sqrt(gap)).
/// Adaptive:     T_k = ceil(gap / theta_k), eta_k = eta_scale theta_k^2 / sqrt(gap).
/// With eta_scale = 1/M and beta0 = max{M, L}/sqrt(gap) these are the
/// theoretical settings; see ApmSchedule::theoretical.
struct ApmSchedule {
  enum class Mode { FixedHorizon, Adaptive };

  Mode mode = Mode::FixedHorizon;
  int horizon = 1;
  double beta0 = 1.0;
  double eta_scale = 1.0;
  int min_inner = 1;
  /// Replace the sliding loop by one proximal step when the problem has a
  /// cheap prox.
  bool direct_prox = false;

  static ApmSchedule theoretical(Mode mode, int horizon, const Problem& problem, double gap);

  double theta(int k) const { return 1.0 / (k + 1.0); }
  double penalty(int k) const { return beta0 / theta(k); }
  int inner_iters(int k, double gap) const;
  double step(int k, double gap) const;
};

/// Closed-form minimizer, row-wise, of
///   <g(z) + s, u> + (L + pen)/2 ||u - y||^2 + 1/(2 eta) ||u - z||^2
/// with g a subgradient of h at z. One subgradient evaluation.
AgentMatrix sliding_inner_step(const AgentMatrix& z, const AgentMatrix& y, const AgentMatrix& s,
                               const Problem& problem, double L, double pen, double eta,
                               Counters& counters);

/// grad f(y) + pen (I - W) y. One communication, and one gradient evaluation
/// unless f is identically zero.
AgentMatrix penalized_gradient(const AgentMatrix& y, const Problem& problem,
                               const WeightMatrix& w, double pen, Counters& counters);

/// prox_{h/(L+pen)}( y - (grad f(y) + pen (I - W) y)/(L + pen) ).
/// Throws NoCheapProx for problems without a closed-form prox.
AgentMatrix direct_prox_step(const AgentMatrix& y, const Problem& problem, const WeightMatrix& w,
                             double L, double pen, Counters& counters);

struct ApmState {
  AgentMatrix x;
  AgentMatrix x_prev;
  /// Last inner iterate of the previous outer iteration.
  AgentMatrix z_carry;
  int k = 0;
  int last_inner = 0;
  Counters counters;
};

ApmState apm_init(const Problem& problem);

void apm_step(ApmState& state, const Problem& problem, const WeightMatrix& w,
              const ApmSchedule& schedule);

RunTrace run_apm(const Problem& problem, const Reference& reference, const WeightMatrix& w,
                 const ApmSchedule& schedule, int iterations, const RunOptions& options = {});

}  // namespace apm
