#include "apm/apm.hpp"

#include <algorithm>
#include <cmath>

#include "apm/schedules.hpp"

namespace apm {

ApmSchedule ApmSchedule::theoretical(Mode mode, int horizon, const Problem& problem, double gap) {
  if (!(gap > 0.0 && gap <= 1.0)) throw InvalidGap("APM schedule needs a gap in (0, 1]");
  const double M = problem.lipschitz();
  const double L = problem.smoothness();
  ApmSchedule s;
  s.mode = mode;
  s.horizon = horizon;
  s.beta0 = std::max(M, L) / std::sqrt(gap);
  s.eta_scale = M > 0.0 ? 1.0 / M : 1.0;
  return s;
}

int ApmSchedule::inner_iters(int k, double gap) const {
  const double raw = mode == Mode::FixedHorizon ? horizon * gap : gap / theta(k);
  return std::max(ceil_count(raw), min_inner);
}

double ApmSchedule::step(int k, double gap) const {
  const double th = theta(k);
  if (mode == Mode::FixedHorizon) return eta_scale * th / (horizon * std::sqrt(gap));
  return eta_scale * th * th / std::sqrt(gap);
}

AgentMatrix sliding_inner_step(const AgentMatrix& z, const AgentMatrix& y, const AgentMatrix& s,
                               const Problem& problem, double L, double pen, double eta,
                               Counters& counters) {
  if (!(eta > 0.0)) throw InvalidArgument("sliding step needs eta > 0");
  const AgentMatrix g = subgradient(problem, z, counters);
  const double inv_eta = 1.0 / eta;
  return ((L + pen) * y + inv_eta * z - g - s) / (L + pen + inv_eta);
}

AgentMatrix penalized_gradient(const AgentMatrix& y, const Problem& problem, const WeightMatrix& w,
                               double pen, Counters& counters) {
  AgentMatrix s = pen * w.laplacian(y);
  ++counters.communications;
  if (problem.has_smooth_part()) s += gradient(problem, y, counters);
  return s;
}

AgentMatrix direct_prox_step(const AgentMatrix& y, const Problem& problem, const WeightMatrix& w,
                             double L, double pen, Counters& counters) {
  if (!problem.has_cheap_prox()) throw NoCheapProx("direct prox step: problem declares no cheap prox");
  const double scale = 1.0 / (L + pen);
  const AgentMatrix s = penalized_gradient(y, problem, w, pen, counters);
  return problem.prox(y - scale * s, scale);
}

ApmState apm_init(const Problem& problem) {
  ApmState s;
  s.x = AgentMatrix::Zero(problem.agents(), problem.dim());
  s.x_prev = s.x;
  s.z_carry = s.x;
  return s;
}

void apm_step(ApmState& state, const Problem& problem, const WeightMatrix& w,
              const ApmSchedule& schedule) {
  const int k = state.k;
  const double gap = w.gap();
  const double L = problem.smoothness();
  const double pen = schedule.penalty(k);

  // theta_k (1 - theta_{k-1}) / theta_{k-1} with theta_j = 1/(j+1); the
  // difference it multiplies is zero at k = 0.
  const double coef = k == 0 ? 0.0 : (k - 1.0) / (k + 1.0);
  AgentMatrix y = state.x;
  if (coef != 0.0) y += coef * (state.x - state.x_prev);

  AgentMatrix next;
  if (schedule.direct_prox) {
    next = direct_prox_step(y, problem, w, L, pen, state.counters);
    state.last_inner = 0;
  } else {
    const AgentMatrix s = penalized_gradient(y, problem, w, pen, state.counters);
    const int inner = schedule.inner_iters(k, gap);
    const double eta = schedule.step(k, gap);
    AgentMatrix z = state.z_carry;
    AgentMatrix sum = AgentMatrix::Zero(z.rows(), z.cols());
    for (int t = 0; t < inner; ++t) {
      z = sliding_inner_step(z, y, s, problem, L, pen, eta, state.counters);
      sum += z;
    }
    next = sum / static_cast<double>(inner);
    state.z_carry = std::move(z);
    state.last_inner = inner;
  }
  state.x_prev.swap(state.x);
  state.x = std::move(next);
  ++state.k;
}

RunTrace run_apm(const Problem& problem, const Reference& reference, const WeightMatrix& w,
                 const ApmSchedule& schedule, int iterations, const RunOptions& options) {
  if (iterations < 1) throw InvalidArgument("run_apm: K must be >= 1");
  if (w.agents() != problem.agents()) throw InvalidArgument("run_apm: weight matrix size mismatch");
  if (!(schedule.beta0 > 0.0)) throw InvalidArgument("run_apm: beta0 must be positive");
  if (!(schedule.eta_scale > 0.0)) throw InvalidArgument("run_apm: eta_scale must be positive");
  if (schedule.horizon < 1) throw InvalidArgument("run_apm: horizon must be >= 1");
  if (schedule.min_inner < 1) throw InvalidArgument("run_apm: inner iterations must be floored at 1 or more");

  RunTrace trace;
  trace.set("algorithm", "apm");
  trace.set("schedule", schedule.mode == ApmSchedule::Mode::FixedHorizon ? "thm3" : "cor1");
  trace.set("beta0", schedule.beta0);
  trace.set("eta_scale", schedule.eta_scale);
  trace.set("horizon", std::to_string(schedule.horizon));
  trace.set("direct_prox", schedule.direct_prox ? "true" : "false");
  trace.set("K", std::to_string(iterations));
  describe_run(trace, problem, reference, w.sigma2(), w.gap());

  TraceRecorder recorder(problem, reference, options, iterations);
  ApmState state = apm_init(problem);
  for (int k = 0; k < iterations; ++k) {
    apm_step(state, problem, w, schedule);
    recorder.record(state.k, state.counters, state.x);
  }
  return recorder.finish(std::move(trace));
}

}  // namespace apm
