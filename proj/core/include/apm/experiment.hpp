#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "apm/network.hpp"
#include "apm/problems.hpp"
#include "apm/trace.hpp"

namespace apm {

/// Everything that determines a run. Serialized as flat JSON whose keys
/// match the member names; the CLI flags use the same names.
struct ExperimentConfig {
  std::string problem = "least_squares";  // least_squares | hinge
  int N = 200;
  int n = 30;
  int m = 20;
  double mu = 1e-2;

  double p = 0.5;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> graph_seed;  // defaults to seed
  int max_retries = 100;

  std::string alg = "apm-c";  // apm-c | apm | extra | dngd
  std::string schedule;       // sc | nsc | thm3 | cor1; empty picks a default
  int K = 300;

  std::optional<double> beta0;
  std::optional<double> inner_divisor;
  bool theory = false;  // accuracy-driven inner counts for apm-c
  double tau = 0.5;
  std::optional<double> eta_scale;
  bool direct_prox = false;
  std::optional<double> step_scale;  // baselines: stepsize = step_scale / L

  int metric_every = 1;
  bool wall_time = false;
  long reference_iters = 1'000'000;
};

ExperimentConfig config_from_json(std::string_view text);
std::string to_json(const ExperimentConfig& config);

/// Throws ValidationError naming the first bad field.
void validate(const ExperimentConfig& config);

/// Schedule actually used once defaults are applied.
std::string resolved_schedule(const ExperimentConfig& config);

struct ExperimentSetup {
  std::shared_ptr<const Problem> problem;
  Reference reference;
  GenerationInfo info;
  Network network;
  WeightMatrix weights;
};

/// Generates graph, weights, problem and reference.
ExperimentSetup prepare(const ExperimentConfig& config);

/// Runs the configured algorithm on a prepared setup.
RunTrace run_algorithm(const ExperimentConfig& config, const ExperimentSetup& setup);

/// validate + prepare + run; the resolved config is embedded in metadata.
RunTrace run_experiment(const ExperimentConfig& config);

}  // namespace apm
