#include "apm/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "apm/schedules.hpp"

namespace apm {

namespace {

void check_smooth(const Problem& problem, const WeightMatrix& w, double stepsize, int iterations,
                  const char* name) {
  const std::string who(name);
  if (iterations < 1) throw InvalidArgument(who + ": K must be >= 1");
  if (!problem.has_smooth_part() || problem.has_nonsmooth_part()) {
    throw InvalidArgument(who + " needs a smooth problem");
  }
  if (w.agents() != problem.agents()) throw InvalidArgument(who + ": weight matrix size mismatch");
  if (!(stepsize >= 0.0) || !std::isfinite(stepsize)) throw InvalidArgument(who + ": stepsize must be >= 0");
}

}  // namespace

RunTrace run_extra(const Problem& problem, const Reference& reference, const WeightMatrix& w,
                   double stepsize, int iterations, const RunOptions& options) {
  check_smooth(problem, w, stepsize, iterations, "extra");
  RunTrace trace;
  trace.set("algorithm", "extra");
  trace.set("stepsize", stepsize);
  trace.set("K", std::to_string(iterations));
  describe_run(trace, problem, reference, w.sigma2(), w.gap());

  TraceRecorder recorder(problem, reference, options, iterations);
  Counters counters;
  AgentMatrix x0 = AgentMatrix::Zero(problem.agents(), problem.dim());
  AgentMatrix g0 = gradient(problem, x0, counters);
  AgentMatrix wx0 = w.mix(x0);
  ++counters.communications;
  AgentMatrix x1 = wx0 - stepsize * g0;
  recorder.record(1, counters, x1);

  for (int k = 2; k <= iterations; ++k) {
    AgentMatrix g1 = gradient(problem, x1, counters);
    AgentMatrix wx1 = w.mix(x1);
    ++counters.communications;
    AgentMatrix x2 = x1 + wx1 - 0.5 * (x0 + wx0) - stepsize * (g1 - g0);
    x0 = std::move(x1);
    wx0 = std::move(wx1);
    g0 = std::move(g1);
    x1 = std::move(x2);
    recorder.record(k, counters, x1);
  }
  return recorder.finish(std::move(trace));
}

RunTrace run_dngd(const Problem& problem, const Reference& reference, const WeightMatrix& w,
                  double stepsize, int iterations, const RunOptions& options) {
  check_smooth(problem, w, stepsize, iterations, "dngd");
  const double mu = problem.strong_convexity();
  const double L = problem.smoothness();
  const bool strongly_convex = mu > 0.0;

  RunTrace trace;
  trace.set("algorithm", "dngd");
  trace.set("variant", strongly_convex ? "sc" : "nsc");
  trace.set("stepsize", stepsize);
  trace.set("K", std::to_string(iterations));
  describe_run(trace, problem, reference, w.sigma2(), w.gap());

  TraceRecorder recorder(problem, reference, options, iterations);
  Counters counters;
  const int m = problem.agents();
  const int n = problem.dim();
  AgentMatrix x = AgentMatrix::Zero(m, n);
  AgentMatrix v = x;
  AgentMatrix y = x;
  AgentMatrix g_prev = gradient(problem, y, counters);
  AgentMatrix s = g_prev;

  double alpha = strongly_convex ? std::sqrt(mu * stepsize) : std::min(1.0, std::sqrt(stepsize * L));
  const double ratio_sc = alpha > 0.0 ? stepsize / alpha : 0.0;

  for (int t = 1; t <= iterations; ++t) {
    const AgentMatrix wy = w.mix(y);
    const AgentMatrix wv = w.mix(v);
    const AgentMatrix ws = w.mix(s);
    ++counters.communications;

    AgentMatrix x_next = wy - stepsize * s;
    AgentMatrix y_next;
    if (alpha == 0.0) {
      v = wv;
      y_next = x_next;
    } else if (strongly_convex) {
      v = (1.0 - alpha) * wv + alpha * wy - ratio_sc * s;
      y_next = (x_next + alpha * v) / (1.0 + alpha);
    } else {
      v = wv - (stepsize / alpha) * s;
      alpha = next_theta_nsc(alpha);
      y_next = (1.0 - alpha) * x_next + alpha * v;
    }
    AgentMatrix g_next = gradient(problem, y_next, counters);
    s = ws + g_next - g_prev;
    g_prev = std::move(g_next);
    x = std::move(x_next);
    y = std::move(y_next);
    recorder.record(t, counters, x);
  }
  return recorder.finish(std::move(trace));
}

}  // namespace apm
