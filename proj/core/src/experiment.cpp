#include "apm/experiment.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "apm/apm.hpp"
#include "apm/apm_c.hpp"
#include "apm/baselines.hpp"

namespace apm {

namespace {

using nlohmann::json;

template <typename T>
T read_as(const json& value, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!value.is_boolean()) throw ValidationError(key, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) throw ValidationError(key, "expected a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!value.is_number_integer()) throw ValidationError(key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (value.is_number_integer() && !value.is_number_unsigned() && value.get<long long>() < 0) {
          throw ValidationError(key, "expected a non-negative integer");
        }
      }
    } else {
      if (!value.is_number()) throw ValidationError(key, "expected a number");
    }
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(key, e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError("config", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config", "expected a JSON object");

  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "problem") c.problem = read_as<std::string>(value, key);
    else if (key == "N") c.N = read_as<int>(value, key);
    else if (key == "n") c.n = read_as<int>(value, key);
    else if (key == "m") c.m = read_as<int>(value, key);
    else if (key == "mu") c.mu = read_as<double>(value, key);
    else if (key == "p") c.p = read_as<double>(value, key);
    else if (key == "seed") c.seed = read_as<std::uint64_t>(value, key);
    else if (key == "graph_seed") c.graph_seed = read_as<std::uint64_t>(value, key);
    else if (key == "max_retries") c.max_retries = read_as<int>(value, key);
    else if (key == "alg") c.alg = read_as<std::string>(value, key);
    else if (key == "schedule") c.schedule = read_as<std::string>(value, key);
    else if (key == "K") c.K = read_as<int>(value, key);
    else if (key == "beta0") c.beta0 = read_as<double>(value, key);
    else if (key == "inner_divisor") c.inner_divisor = read_as<double>(value, key);
    else if (key == "theory") c.theory = read_as<bool>(value, key);
    else if (key == "tau") c.tau = read_as<double>(value, key);
    else if (key == "eta_scale") c.eta_scale = read_as<double>(value, key);
    else if (key == "direct_prox") c.direct_prox = read_as<bool>(value, key);
    else if (key == "step_scale") c.step_scale = read_as<double>(value, key);
    else if (key == "metric_every") c.metric_every = read_as<int>(value, key);
    else if (key == "wall_time") c.wall_time = read_as<bool>(value, key);
    else if (key == "reference_iters") c.reference_iters = read_as<long>(value, key);
    else throw ValidationError(key, "unknown configuration key");
  }
  return c;
}

std::string to_json(const ExperimentConfig& c) {
  json doc = {{"problem", c.problem}, {"N", c.N},
              {"n", c.n},             {"m", c.m},
              {"mu", c.mu},           {"p", c.p},
              {"seed", c.seed},       {"max_retries", c.max_retries},
              {"alg", c.alg},         {"schedule", resolved_schedule(c)},
              {"K", c.K},             {"theory", c.theory},
              {"tau", c.tau},         {"direct_prox", c.direct_prox},
              {"metric_every", c.metric_every}, {"wall_time", c.wall_time},
              {"reference_iters", c.reference_iters}};
  if (c.graph_seed) doc["graph_seed"] = *c.graph_seed;
  if (c.beta0) doc["beta0"] = *c.beta0;
  if (c.inner_divisor) doc["inner_divisor"] = *c.inner_divisor;
  if (c.eta_scale) doc["eta_scale"] = *c.eta_scale;
  if (c.step_scale) doc["step_scale"] = *c.step_scale;
  return doc.dump();
}

std::string resolved_schedule(const ExperimentConfig& c) {
  if (!c.schedule.empty()) return c.schedule;
  if (c.alg == "apm-c") return c.mu > 0.0 ? "sc" : "nsc";
  if (c.alg == "apm") return "thm3";
  return "";
}

void validate(const ExperimentConfig& c) {
  static const std::set<std::string> algorithms{"apm-c", "apm", "extra", "dngd"};
  if (c.problem != "least_squares" && c.problem != "hinge") {
    throw ValidationError("problem", "must be 'least_squares' or 'hinge', got '" + c.problem + "'");
  }
  if (c.N < 1) throw ValidationError("N", "must be >= 1");
  if (c.n < 1) throw ValidationError("n", "must be >= 1");
  if (c.m < 1) throw ValidationError("m", "must be >= 1");
  if (c.N % c.m != 0) throw ValidationError("N", "must be divisible by m");
  if (!(c.mu >= 0.0) || !std::isfinite(c.mu)) throw ValidationError("mu", "must be a finite number >= 0");
  if (!(c.p >= 0.0 && c.p <= 1.0)) throw ValidationError("p", "must lie in [0, 1]");
  if (c.max_retries < 0) throw ValidationError("max_retries", "must be >= 0");
  if (!algorithms.count(c.alg)) {
    throw ValidationError("alg", "unknown algorithm '" + c.alg + "' (expected apm-c, apm, extra or dngd)");
  }
  if (c.K < 1) throw ValidationError("K", "must be >= 1");

  const std::string sched = resolved_schedule(c);
  if (c.alg == "apm-c") {
    if (sched != "sc" && sched != "nsc") throw ValidationError("schedule", "apm-c takes 'sc' or 'nsc'");
    if (sched == "sc" && !(c.mu > 0.0)) throw ValidationError("schedule", "'sc' needs mu > 0");
  } else if (c.alg == "apm") {
    if (sched != "thm3" && sched != "cor1") throw ValidationError("schedule", "apm takes 'thm3' or 'cor1'");
  } else if (!sched.empty()) {
    throw ValidationError("schedule", c.alg + " takes no schedule");
  }

  if (c.alg != "apm" && c.problem != "least_squares") {
    throw ValidationError("problem", c.alg + " needs the smooth least_squares problem");
  }
  if (c.direct_prox && (c.alg != "apm" || c.problem == "hinge")) {
    throw ValidationError("direct_prox", "only apm on a problem with a cheap prox (least_squares)");
  }
  if (c.theory && c.alg != "apm-c") throw ValidationError("theory", "only meaningful for apm-c");
  if (c.beta0 && !(*c.beta0 > 0.0)) throw ValidationError("beta0", "must be > 0");
  if (c.inner_divisor && !(*c.inner_divisor > 0.0)) throw ValidationError("inner_divisor", "must be > 0");
  if (!(c.tau > 0.0)) throw ValidationError("tau", "must be > 0");
  if (c.eta_scale && !(*c.eta_scale > 0.0)) throw ValidationError("eta_scale", "must be > 0");
  if (c.step_scale && !(*c.step_scale >= 0.0)) throw ValidationError("step_scale", "must be >= 0");
  if (c.metric_every < 1) throw ValidationError("metric_every", "must be >= 1");
  if (c.reference_iters < 1) throw ValidationError("reference_iters", "must be >= 1");
}

ExperimentSetup prepare(const ExperimentConfig& c) {
  Network net = build_erdos_renyi(c.m, c.p, c.graph_seed.value_or(c.seed), c.max_retries);
  WeightMatrix w = lazy_metropolis_weights(net);
  if (c.problem == "least_squares") {
    auto inst = gen_least_squares(c.N, c.n, c.m, c.mu, c.seed);
    return {inst.problem, std::move(inst.reference), inst.info, std::move(net), std::move(w)};
  }
  SubgradientReferenceOptions opts;
  opts.iterations = c.reference_iters;
  opts.tuning_iterations = std::min<long>(opts.tuning_iterations, c.reference_iters);
  auto inst = gen_hinge_svm(c.N, c.n, c.m, c.seed, opts);
  return {inst.problem, std::move(inst.reference), inst.info, std::move(net), std::move(w)};
}

RunTrace run_algorithm(const ExperimentConfig& c, const ExperimentSetup& setup) {
  const Problem& problem = *setup.problem;
  RunOptions options{c.metric_every, c.wall_time};
  const std::string sched = resolved_schedule(c);

  if (c.alg == "apm-c") {
    ApmcSchedule s = sched == "sc" ? ApmcSchedule::strongly_convex() : ApmcSchedule::nonstrongly_convex();
    if (c.beta0) s.beta0 = *c.beta0;
    if (c.inner_divisor) s.inner_divisor = *c.inner_divisor;
    s.rule = c.theory ? InnerRule::Theory : InnerRule::Tuned;
    s.tau = c.tau;
    return run_apm_c(problem, setup.reference, setup.weights, s, c.K, options);
  }
  if (c.alg == "apm") {
    const auto mode = sched == "thm3" ? ApmSchedule::Mode::FixedHorizon : ApmSchedule::Mode::Adaptive;
    ApmSchedule s = ApmSchedule::theoretical(mode, c.K, problem, setup.weights.gap());
    if (c.beta0) s.beta0 = *c.beta0;
    if (c.eta_scale) s.eta_scale = *c.eta_scale;
    s.direct_prox = c.direct_prox;
    return run_apm(problem, setup.reference, setup.weights, s, c.K, options);
  }
  const double L = problem.smoothness();
  if (c.alg == "extra") {
    return run_extra(problem, setup.reference, setup.weights, c.step_scale.value_or(1.0) / L, c.K, options);
  }
  return run_dngd(problem, setup.reference, setup.weights, c.step_scale.value_or(0.5) / L, c.K, options);
}

RunTrace run_experiment(const ExperimentConfig& config) {
  validate(config);
  const ExperimentSetup setup = prepare(config);
  RunTrace trace = run_algorithm(config, setup);
  trace.set("seed", std::to_string(config.seed));
  trace.set("config", to_json(config));
  return trace;
}

}  // namespace apm
