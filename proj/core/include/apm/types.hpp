#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace apm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Stacked local variables of all agents: row i is agent i's copy x_(i).
/// Row-major so each agent's copy is contiguous; mixing with the sparse W
/// is then a sequence of row axpys.
using AgentMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random graph generation gave up before producing a connected graph.
class NotConnected : public Error {
 public:
  using Error::Error;
};

/// Weight matrix has (numerically) no spectral gap.
class DegenerateGap : public Error {
 public:
  using Error::Error;
};

/// A second eigenvalue outside [0, 1) was passed where a gap is required.
class InvalidGap : public Error {
 public:
  using Error::Error;
};

/// Sample count is not a multiple of the agent count.
class IndivisibleData : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// The nonsmooth part of a problem has no closed-form proximal mapping.
class NoCheapProx : public Error {
 public:
  using Error::Error;
};

/// Malformed input to a constructor or operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration rejected; carries the offending field name.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Work performed by a run.
///
/// One communication is a single synchronous neighbor exchange by all agents.
/// One (sub)gradient evaluation is one local evaluation by every agent. The
/// counters only ever grow.
struct Counters {
  std::uint64_t communications = 0;
  std::uint64_t grad_evals = 0;
  std::uint64_t subgrad_evals = 0;

  friend bool operator==(const Counters&, const Counters&) = default;
};

}  // namespace apm
