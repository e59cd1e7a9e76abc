#include "apm/apm_c.hpp"

#include <cmath>
#include <sstream>

namespace apm {

ApmcState apm_c_init(const Problem& problem) {
  ApmcState s;
  s.x = AgentMatrix::Zero(problem.agents(), problem.dim());
  s.x_prev = s.x;
  return s;
}

double apmc_theta(const ApmcSchedule& schedule, double mu, double L, NscThetaSequence& nsc, int k) {
  if (schedule.kind == ApmcSchedule::Kind::StronglyConvex) return std::sqrt(mu / L);
  return nsc(k);
}

namespace {

double vartheta(const ApmcSchedule& schedule, double theta, int k) {
  if (schedule.kind == ApmcSchedule::Kind::StronglyConvex) return std::pow(1.0 - theta, k + 1);
  return theta * theta;
}

int inner_count(const ApmcSchedule& schedule, const WeightMatrix& w, const AgentMatrix& z,
                double theta, double vt, int k) {
  if (schedule.fixed_inner) return *schedule.fixed_inner;
  int t = 0;
  if (schedule.rule == InnerRule::Tuned) {
    const double denom = schedule.inner_divisor * std::sqrt(w.gap());
    const double raw = schedule.kind == ApmcSchedule::Kind::StronglyConvex
                           ? k * theta / denom
                           : std::log(k + 1.0) / denom;
    t = ceil_count(raw);
  } else {
    double eps = 0.0;
    if (schedule.kind == ApmcSchedule::Kind::StronglyConvex) {
      const double base = 1.0 - (1.0 + schedule.tau) * theta;
      if (!(base > 0.0)) throw InvalidArgument("theory inner rule needs (1 + tau) theta < 1");
      eps = std::pow(base, k + 1);
    } else {
      eps = std::pow(k + 1.0, -6.0);
    }
    if (eps > 0.0 && vt > 0.0) {
      t = required_inner_iters(schedule.beta0, vt, eps, disagreement(z).squaredNorm(), w.sigma2());
    } else {
      throw InvalidArgument("theory inner rule underflowed; horizon too long for the schedule");
    }
  }
  return std::max(t, schedule.min_inner);
}

}  // namespace

double apmc_extrapolation(double L, double mu, double theta, double theta_prev, int k) {
  if (k == 0 || L == mu) return 0.0;
  return (L * theta - mu) / (L - mu) * (1.0 - theta_prev) / theta_prev;
}

AgentMatrix penalty_prox(const AgentMatrix& z, const AgentMatrix& z_mixed, double L, double vt,
                         double beta0) {
  const double a = L * vt;
  return (a * z + beta0 * z_mixed) / (a + beta0);
}

void apm_c_step(ApmcState& state, const Problem& problem, const WeightMatrix& w,
                const ApmcSchedule& schedule, NscThetaSequence& nsc) {
  const double L = problem.smoothness();
  const double mu = problem.strong_convexity();
  const int k = state.k;

  const double theta = apmc_theta(schedule, mu, L, nsc, k);
  const double vt = vartheta(schedule, theta, k);
  const double coef = apmc_extrapolation(L, mu, theta, state.theta_prev, k);

  AgentMatrix y = state.x;
  if (coef != 0.0) y += coef * (state.x - state.x_prev);
  AgentMatrix z = y - gradient(problem, y, state.counters) / L;

  const int inner = inner_count(schedule, w, z, theta, vt, k);
  const AgentMatrix mixed =
      accelerated_consensus(ConsensusParams::for_matrix(w), z, inner, state.counters);

  state.x_prev.swap(state.x);
  state.x = penalty_prox(z, mixed, L, vt, schedule.beta0);
  state.theta_prev = theta;
  state.last_inner = inner;
  ++state.k;
}

RunTrace run_apm_c(const Problem& problem, const Reference& reference, const WeightMatrix& w,
                   const ApmcSchedule& schedule, int iterations, const RunOptions& options) {
  if (iterations < 1) throw InvalidArgument("run_apm_c: K must be >= 1");
  if (!problem.has_smooth_part() || problem.has_nonsmooth_part()) {
    throw InvalidArgument("run_apm_c needs a smooth problem without a nonsmooth part");
  }
  if (w.agents() != problem.agents()) throw InvalidArgument("run_apm_c: weight matrix size mismatch");
  const double L = problem.smoothness();
  const double mu = problem.strong_convexity();
  if (!(L > 0.0)) throw InvalidArgument("run_apm_c needs L > 0");
  if (!(schedule.beta0 > 0.0)) throw InvalidArgument("run_apm_c: beta0 must be positive");
  if (schedule.kind == ApmcSchedule::Kind::StronglyConvex && !(mu > 0.0)) {
    throw InvalidArgument("strongly convex schedule needs mu > 0");
  }
  if (schedule.rule == InnerRule::Tuned && !schedule.fixed_inner && !(schedule.inner_divisor > 0.0)) {
    throw InvalidArgument("inner_divisor must be positive");
  }

  RunTrace trace;
  trace.set("algorithm", "apm-c");
  trace.set("schedule", schedule.kind == ApmcSchedule::Kind::StronglyConvex ? "sc" : "nsc");
  trace.set("inner_rule", schedule.rule == InnerRule::Tuned ? "tuned" : "theory");
  trace.set("beta0", schedule.beta0);
  trace.set("inner_divisor", schedule.inner_divisor);
  trace.set("consensus_eta", consensus_momentum(w.sigma2()));
  trace.set("K", std::to_string(iterations));
  describe_run(trace, problem, reference, w.sigma2(), w.gap());

  if (schedule.kind == ApmcSchedule::Kind::NonStronglyConvex) {
    const AgentMatrix stacked = reference.x_star.transpose().replicate(problem.agents(), 1);
    const double need = L * problem.smooth_gradient(stacked).squaredNorm();
    if (schedule.beta0 < need) {
      std::ostringstream msg;
      msg << "beta0 = " << schedule.beta0 << " is below L ||grad f(x*)||_F^2 = " << need;
      trace.set("warning", msg.str());
    }
  }

  TraceRecorder recorder(problem, reference, options, iterations);
  ApmcState state = apm_c_init(problem);
  NscThetaSequence nsc;
  for (int k = 0; k < iterations; ++k) {
    apm_c_step(state, problem, w, schedule, nsc);
    recorder.record(state.k, state.counters, state.x);
  }
  return recorder.finish(std::move(trace));
}

}  // namespace apm
