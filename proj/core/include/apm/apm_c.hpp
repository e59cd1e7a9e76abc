#pragma once

#include <optional>

#include "apm/consensus.hpp"
#include "apm/network.hpp"
#include "apm/problems.hpp"
#include "apm/schedules.hpp"
#include "apm/trace.hpp"

namespace apm {

/// How many consensus rounds each outer iteration gets.
enum class InnerRule {
  /// ceil(k theta / (d sqrt(gap))) for strongly convex problems,
  /// ceil(log(k+1) / (d sqrt(gap))) otherwise; d is inner_divisor.
  Tuned,
  /// Accuracy-driven count from required_inner_iters with
  /// eps_k = (1 - (1 + tau) theta)^(k+1) (strongly convex) or 1/(k+1)^6.
  Theory,
};

/// Parameter sequences of the accelerated penalty method with consensus.
///
/// Strongly convex: theta_k = sqrt(mu/L), vartheta_k = (1 - theta)^(k+1).
/// Otherwise: theta_0 = 1, (1 - theta_k)/theta_k^2 = 1/theta_{k-1}^2,
/// vartheta_k = theta_k^2. The penalty at iteration k is beta0 / vartheta_k.
struct ApmcSchedule {
  enum class Kind { StronglyConvex, NonStronglyConvex };

  Kind kind = Kind::StronglyConvex;
  double beta0 = 100.0;
  double inner_divisor = 3.0;
  InnerRule rule = InnerRule::Tuned;
  double tau = 0.5;
  int min_inner = 1;
  /// Overrides every inner count when set.
  std::optional<int> fixed_inner;

  static ApmcSchedule strongly_convex(double beta0 = 100.0, double inner_divisor = 3.0) {
    ApmcSchedule s;
    s.beta0 = beta0;
    s.inner_divisor = inner_divisor;
    return s;
  }
  static ApmcSchedule nonstrongly_convex(double beta0 = 100.0, double inner_divisor = 5.0) {
    ApmcSchedule s;
    s.kind = Kind::NonStronglyConvex;
    s.beta0 = beta0;
    s.inner_divisor = inner_divisor;
    return s;
  }
};

struct ApmcState {
  AgentMatrix x;
  AgentMatrix x_prev;
  int k = 0;
  /// theta_{k-1}; meaningless at k = 0.
  double theta_prev = 0.0;
  int last_inner = 0;
  Counters counters;
};

/// x^0 = x^{-1} = 0.
ApmcState apm_c_init(const Problem& problem);

/// theta_k for the schedule. Needs mu and L for the strongly convex case.
double apmc_theta(const ApmcSchedule& schedule, double mu, double L, NscThetaSequence& nsc, int k);

/// Coefficient multiplying x^k - x^{k-1} in the extrapolation step. Zero at
/// k = 0 and whenever L == mu.
double apmc_extrapolation(double L, double mu, double theta, double theta_prev, int k);

/// Closed-form minimizer of beta0/(2 vartheta) ||Pi x||^2 + L/2 ||x - z||^2
/// given an approximation `z_mixed` of 1 alpha(z)^T:
/// (L vartheta z + beta0 z_mixed) / (L vartheta + beta0).
AgentMatrix penalty_prox(const AgentMatrix& z, const AgentMatrix& z_mixed, double L,
                         double vartheta, double beta0);

/// One outer iteration: extrapolate, one gradient step, T_k accelerated
/// consensus rounds, convex combination. Advances state.k.
void apm_c_step(ApmcState& state, const Problem& problem, const WeightMatrix& w,
                const ApmcSchedule& schedule, NscThetaSequence& nsc);

/// K outer iterations from zero. Problem must be smooth with L > 0.
RunTrace run_apm_c(const Problem& problem, const Reference& reference, const WeightMatrix& w,
                   const ApmcSchedule& schedule, int iterations, const RunOptions& options = {});

}  // namespace apm
