#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "apm/problems.hpp"
#include "apm/types.hpp"

namespace apm {

struct TraceRow {
  int k = 0;
  std::uint64_t grad_evals = 0;
  std::uint64_t subgrad_evals = 0;
  std::uint64_t comms = 0;
  double obj_gap = 0.0;
  double consensus_violation = 0.0;
  double wall_ms = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Per-outer-iteration record of a run. Row k is emitted after k outer
/// iterations, with counters cumulative at that point.
struct RunTrace {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<TraceRow> rows;

  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value);
  /// Empty string when absent.
  std::string get(const std::string& key) const;
};

struct Metrics {
  double obj_gap = 0.0;
  double consensus_violation = 0.0;
};

/// Objective gap at the row average and mean squared distance to it.
/// Does not touch any counter.
Metrics evaluate_metrics(const AgentMatrix& x, const Problem& problem, const Reference& reference);

struct RunOptions {
  /// Emit a row every this many outer iterations (the last one is always kept).
  int metric_every = 1;
  /// Fill wall_ms; off by default so traces are reproducible byte for byte.
  bool wall_time = false;
};

/// Collects rows while an algorithm runs.
class TraceRecorder {
 public:
  TraceRecorder(const Problem& problem, const Reference& reference, RunOptions options,
                int horizon);

  void record(int k, const Counters& counters, const AgentMatrix& x);
  RunTrace finish(RunTrace&& trace);
  std::vector<TraceRow>& rows() noexcept { return rows_; }

 private:
  const Problem& problem_;
  const Reference& reference_;
  RunOptions options_;
  int horizon_;
  std::chrono::steady_clock::time_point start_;
  std::vector<TraceRow> rows_;
};

/// Common metadata: gap, L, mu, M, R1 = max_i ||x0_(i) - x*|| for the zero
/// start, R2 = max_i ||grad f_i(x*)||.
void describe_run(RunTrace& trace, const Problem& problem, const Reference& reference,
                  double sigma2, double gap);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

inline constexpr const char* kTraceHeader =
    "k,grad_evals,subgrad_evals,comms,obj_gap,consensus_violation,wall_ms";

void write_trace_csv(const RunTrace& trace, std::ostream& out);
/// Throws apm::Error naming the path on IO failure.
void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path);

RunTrace read_trace_csv(std::istream& in);
RunTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace apm
