#include "apm/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "apm/network.hpp"

namespace apm {

void RunTrace::set(const std::string& key, std::string value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  metadata.emplace_back(key, std::move(value));
}

void RunTrace::set(const std::string& key, double value) { set(key, format_double(value)); }

std::string RunTrace::get(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return {};
}

Metrics evaluate_metrics(const AgentMatrix& x, const Problem& problem, const Reference& reference) {
  const Vector avg = row_average(x);
  Metrics out;
  out.obj_gap = problem.objective(avg) - reference.f_star;
  out.consensus_violation = (x.rowwise() - avg.transpose()).squaredNorm() / static_cast<double>(x.rows());
  return out;
}

TraceRecorder::TraceRecorder(const Problem& problem, const Reference& reference, RunOptions options,
                             int horizon)
    : problem_(problem),
      reference_(reference),
      options_(options),
      horizon_(horizon),
      start_(std::chrono::steady_clock::now()) {
  if (options_.metric_every < 1) throw InvalidArgument("metric_every must be >= 1");
  rows_.reserve(static_cast<std::size_t>(horizon / options_.metric_every + 1));
}

void TraceRecorder::record(int k, const Counters& counters, const AgentMatrix& x) {
  if (k % options_.metric_every != 0 && k != horizon_) return;
  TraceRow row;
  row.k = k;
  row.grad_evals = counters.grad_evals;
  row.subgrad_evals = counters.subgrad_evals;
  row.comms = counters.communications;
  if (options_.wall_time) {
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }
  const Metrics m = evaluate_metrics(x, problem_, reference_);
  row.obj_gap = m.obj_gap;
  row.consensus_violation = m.consensus_violation;
  rows_.push_back(row);
}

RunTrace TraceRecorder::finish(RunTrace&& trace) {
  trace.rows = std::move(rows_);
  return std::move(trace);
}

void describe_run(RunTrace& trace, const Problem& problem, const Reference& reference, double sigma2,
                  double gap) {
  trace.set("sigma2", sigma2);
  trace.set("gap", gap);
  trace.set("L", problem.smoothness());
  trace.set("mu", problem.strong_convexity());
  trace.set("M", problem.lipschitz());
  trace.set("f_star", reference.f_star);
  // Zero start: ||x0_(i) - x*|| is the same for every agent.
  trace.set("R1", reference.x_star.norm());
  double r2 = 0.0;
  if (problem.has_smooth_part()) {
    const AgentMatrix stacked = reference.x_star.transpose().replicate(problem.agents(), 1);
    r2 = problem.smooth_gradient(stacked).rowwise().norm().maxCoeff();
  }
  trace.set("R2", r2);
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  for (const auto& [key, value] : trace.metadata) out << "# " << key << ": " << value << '\n';
  out << kTraceHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    out << r.k << ',' << r.grad_evals << ',' << r.subgrad_evals << ',' << r.comms << ','
        << format_double(r.obj_gap) << ',' << format_double(r.consensus_violation) << ','
        << format_double(r.wall_ms) << '\n';
  }
}

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_trace_csv(trace, out);
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

namespace {

template <typename T>
T parse_field(std::string_view text, int line) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error("trace csv line " + std::to_string(line) + ": bad field '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

RunTrace read_trace_csv(std::istream& in) {
  RunTrace trace;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (line.rfind("# ", 0) == 0) {
        const auto sep = line.find(": ", 2);
        if (sep == std::string::npos) throw Error("trace csv line " + std::to_string(lineno) + ": bad metadata");
        trace.metadata.emplace_back(line.substr(2, sep - 2), line.substr(sep + 2));
        continue;
      }
      if (line != kTraceHeader) throw Error("trace csv: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    std::string_view rest(line);
    std::string_view f[7];
    for (int i = 0; i < 7; ++i) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (i == 6)) {
        throw Error("trace csv line " + std::to_string(lineno) + ": expected 7 fields");
      }
      f[i] = rest.substr(0, comma);
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    TraceRow r;
    r.k = parse_field<int>(f[0], lineno);
    r.grad_evals = parse_field<std::uint64_t>(f[1], lineno);
    r.subgrad_evals = parse_field<std::uint64_t>(f[2], lineno);
    r.comms = parse_field<std::uint64_t>(f[3], lineno);
    r.obj_gap = parse_field<double>(f[4], lineno);
    r.consensus_violation = parse_field<double>(f[5], lineno);
    r.wall_ms = parse_field<double>(f[6], lineno);
    trace.rows.push_back(r);
  }
  if (!header) throw Error("trace csv: missing header");
  return trace;
}

RunTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return read_trace_csv(in);
}

}  // namespace apm
