// apmsim: generate instances, run one decentralized solver, or sweep several
// solvers on a shared instance.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "apm/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 1;

using Setter = std::function<void(apm::ExperimentConfig&)>;

/// Flags that mirror config keys. Values given on the command line are
/// applied on top of --config (or the defaults) after parsing.
struct ConfigFlags {
  std::string config_path;
  std::vector<Setter> setters;

  template <typename T, typename Field>
  void add(CLI::App& app, const std::string& names, Field field, const std::string& help) {
    app.add_option_function<T>(
        names, [this, field](const T& v) { setters.push_back([field, v](apm::ExperimentConfig& c) { c.*field = v; }); },
        help);
  }

  void flag(CLI::App& app, const std::string& names, bool apm::ExperimentConfig::*field,
            const std::string& help) {
    app.add_flag_function(
        names, [this, field](std::int64_t) { setters.push_back([field](apm::ExperimentConfig& c) { c.*field = true; }); },
        help);
  }

  void attach(CLI::App& app, bool with_algorithm) {
    using C = apm::ExperimentConfig;
    app.add_option("--config", config_path, "JSON config; flags override its keys")->check(CLI::ExistingFile);
    add<std::string>(app, "--problem", &C::problem, "least_squares | hinge");
    add<int>(app, "--N", &C::N, "total samples");
    add<int>(app, "--n", &C::n, "dimension");
    add<int>(app, "--m", &C::m, "agents");
    add<double>(app, "--mu", &C::mu, "l2 regularization (least squares)");
    add<double>(app, "--p", &C::p, "edge probability");
    add<std::uint64_t>(app, "--seed", &C::seed, "data seed (and graph seed unless --graph_seed)");
    add<std::uint64_t>(app, "--graph_seed,--graph-seed", &C::graph_seed, "graph seed");
    add<int>(app, "--max_retries,--max-retries", &C::max_retries, "redraws of a disconnected graph");
    add<long>(app, "--reference_iters,--reference-iters", &C::reference_iters,
              "subgradient iterations of the hinge reference");
    if (!with_algorithm) return;
    add<std::string>(app, "--alg", &C::alg, "apm-c | apm | extra | dngd");
    add<std::string>(app, "--schedule", &C::schedule, "sc | nsc (apm-c), thm3 | cor1 (apm)");
    add<int>(app, "--K", &C::K, "outer iterations");
    add<double>(app, "--beta0", &C::beta0, "penalty scale");
    add<double>(app, "--inner_divisor,--inner-divisor", &C::inner_divisor, "apm-c consensus-round divisor");
    flag(app, "--theory", &C::theory, "apm-c: accuracy-driven consensus rounds");
    add<double>(app, "--tau", &C::tau, "apm-c theory accuracy exponent");
    add<double>(app, "--eta_scale,--eta-scale", &C::eta_scale, "apm inner step scale");
    flag(app, "--direct_prox,--direct-prox", &C::direct_prox, "apm: closed-form prox instead of sliding");
    add<double>(app, "--step_scale,--step-scale", &C::step_scale, "extra/dngd stepsize times L");
    add<int>(app, "--metric_every,--metric-every", &C::metric_every, "row cadence");
    flag(app, "--wall_time,--wall-time", &C::wall_time, "record wall_ms");
  }

  apm::ExperimentConfig resolve() const {
    apm::ExperimentConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw apm::Error("cannot read " + config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      c = apm::config_from_json(buf.str());
    }
    for (const auto& s : setters) s(c);
    return c;
  }
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw apm::Error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text << '\n';
  if (!out) throw apm::Error("cannot write " + path.string());
}

/// Setup from files written by `gen`. The config is updated to describe the
/// loaded instance so validation and metadata match it.
apm::ExperimentSetup load_setup(apm::ExperimentConfig& config, const fs::path& network_path,
                                const fs::path& problem_path) {
  auto net = apm::network_from_json(read_file(network_path));
  auto doc = apm::problem_from_json(read_file(problem_path));
  if (net.network.agents() != doc.problem->agents()) {
    throw apm::ValidationError("network", "agent count differs from the problem's");
  }
  config.problem = doc.info.kind;
  config.N = doc.info.samples;
  config.n = doc.info.dim;
  config.m = doc.info.agents;
  config.mu = doc.info.mu;
  config.seed = doc.info.seed;
  apm::validate(config);
  apm::WeightMatrix w = net.weights ? apm::WeightMatrix::from_dense(*net.weights)
                                    : apm::lazy_metropolis_weights(net.network);
  return {doc.problem, std::move(doc.reference), doc.info, std::move(net.network), std::move(w)};
}

void print_summary(std::ostream& os, const std::string& label, const apm::RunTrace& trace) {
  os << label;
  if (trace.rows.empty()) {
    os << ": no rows\n";
    return;
  }
  const auto& r = trace.rows.back();
  os << ": K=" << r.k << " obj_gap=" << apm::format_double(r.obj_gap)
     << " consensus=" << apm::format_double(r.consensus_violation) << " grads=" << r.grad_evals
     << " subgrads=" << r.subgrad_evals << " comms=" << r.comms
     << " gap(W)=" << trace.get("gap") << '\n';
  const std::string warning = trace.get("warning");
  if (!warning.empty()) os << "  warning: " << warning << '\n';
}

int cmd_gen(const ConfigFlags& flags, const fs::path& out_dir) {
  apm::ExperimentConfig c = flags.resolve();
  // gen takes no algorithm flags; pick one the problem accepts so only the
  // data and network fields are checked.
  if (c.problem == "hinge") c.alg = "apm";
  apm::validate(c);
  apm::Network net = apm::build_erdos_renyi(c.m, c.p, c.graph_seed.value_or(c.seed), c.max_retries);
  apm::WeightMatrix w = apm::lazy_metropolis_weights(net);
  std::string problem_json;
  double L = 0.0;
  if (c.problem == "least_squares") {
    auto inst = apm::gen_least_squares(c.N, c.n, c.m, c.mu, c.seed);
    L = inst.problem->smoothness();
    problem_json = apm::to_json(inst);
  } else {
    apm::SubgradientReferenceOptions opts;
    opts.iterations = c.reference_iters;
    opts.tuning_iterations = std::min<long>(opts.tuning_iterations, c.reference_iters);
    problem_json = apm::to_json(apm::gen_hinge_svm(c.N, c.n, c.m, c.seed, opts));
  }
  write_file(out_dir / "network.json", apm::to_json(net, &w));
  write_file(out_dir / "problem.json", problem_json);
  std::cout << "wrote " << (out_dir / "network.json").string() << " and "
            << (out_dir / "problem.json").string() << '\n'
            << "agents=" << net.agents() << " edges=" << net.edges().size()
            << " sigma2=" << apm::format_double(w.sigma2()) << " gap=" << apm::format_double(w.gap());
  if (L > 0.0) std::cout << " L=" << apm::format_double(L);
  std::cout << '\n';
  return 0;
}

int cmd_run(const ConfigFlags& flags, const std::string& out, const std::string& network_path,
            const std::string& problem_path) {
  apm::ExperimentConfig c = flags.resolve();
  apm::RunTrace trace;
  if (!network_path.empty() || !problem_path.empty()) {
    if (network_path.empty() || problem_path.empty()) {
      throw apm::ValidationError("network", "--network and --problem go together");
    }
    const auto setup = load_setup(c, network_path, problem_path);
    trace = apm::run_algorithm(c, setup);
    trace.set("seed", std::to_string(c.seed));
    trace.set("config", apm::to_json(c));
  } else {
    trace = apm::run_experiment(c);
  }
  if (out.empty() || out == "-") {
    apm::write_trace_csv(trace, std::cout);
    print_summary(std::cerr, c.alg, trace);
  } else {
    apm::write_trace_csv(trace, fs::path(out));
    print_summary(std::cout, c.alg, trace);
  }
  return 0;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

int cmd_compare(const ConfigFlags& flags, const fs::path& out_dir, const std::string& algs_text,
                int jobs) {
  const apm::ExperimentConfig base = flags.resolve();
  std::vector<std::string> algs = split_list(algs_text);
  if (algs.empty()) {
    algs = base.problem == "hinge" ? std::vector<std::string>{"apm"}
                                   : std::vector<std::string>{"apm-c", "apm", "extra", "dngd"};
  }

  // A schedule only applies to the algorithm that owns it.
  auto owner = [](const std::string& s) -> std::string {
    if (s == "sc" || s == "nsc") return "apm-c";
    if (s == "thm3" || s == "cor1") return "apm";
    return "";
  };
  if (!base.schedule.empty() && owner(base.schedule).empty()) {
    throw apm::ValidationError("schedule", "unknown schedule '" + base.schedule + "'");
  }
  std::vector<apm::ExperimentConfig> configs;
  for (const auto& alg : algs) {
    apm::ExperimentConfig c = base;
    c.alg = alg;
    if (owner(c.schedule) != alg) c.schedule.clear();
    apm::validate(c);
    configs.push_back(c);
  }

  const apm::ExperimentSetup setup = apm::prepare(base);
  fs::create_directories(out_dir);
  std::cout << "instance: agents=" << setup.network.agents()
            << " gap=" << apm::format_double(setup.weights.gap()) << '\n';

  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::vector<std::string> failures;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const auto& c = configs[i];
      const std::string sched = apm::resolved_schedule(c);
      const std::string name = sched.empty() ? c.alg : c.alg + "-" + sched;
      try {
        apm::RunTrace trace = apm::run_algorithm(c, setup);
        trace.set("seed", std::to_string(c.seed));
        trace.set("config", apm::to_json(c));
        apm::write_trace_csv(trace, out_dir / (name + ".csv"));
        std::lock_guard lock(io);
        print_summary(std::cout, name, trace);
      } catch (const std::exception& e) {
        std::lock_guard lock(io);
        failures.push_back(name + ": " + e.what());
      }
    }
  };
  const int workers = std::clamp(jobs, 1, static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& f : failures) std::cerr << "error: " << f << '\n';
  return failures.empty() ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized accelerated penalty methods: instance generation and runs"};
  app.require_subcommand(1);

  ConfigFlags gen_flags, run_flags, compare_flags;

  auto* gen = app.add_subcommand("gen", "write network.json and problem.json");
  std::string gen_out = ".";
  gen_flags.attach(*gen, false);
  gen->add_option("--out", gen_out, "output directory");

  auto* run = app.add_subcommand("run", "run one experiment and write its trace CSV");
  std::string run_out, network_path, problem_path;
  run_flags.attach(*run, true);
  run->add_option("--out", run_out, "trace CSV path ('-' or absent: stdout)");
  run->add_option("--network", network_path, "network.json from gen")->check(CLI::ExistingFile);
  run->add_option("--problem_file,--problem-file", problem_path, "problem.json from gen")
      ->check(CLI::ExistingFile);

  auto* compare = app.add_subcommand("compare", "run several algorithms on one instance");
  std::string compare_out = "traces", algs;
  int jobs = 1;
  compare_flags.attach(*compare, true);
  compare->add_option("--out", compare_out, "output directory");
  compare->add_option("--algs", algs, "comma-separated algorithms (default: all applicable)");
  compare->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*gen) return cmd_gen(gen_flags, gen_out);
    if (*run) return cmd_run(run_flags, run_out, network_path, problem_path);
    return cmd_compare(compare_flags, compare_out, algs, jobs);
  } catch (const apm::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
