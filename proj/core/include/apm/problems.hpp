#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "apm/types.hpp"

namespace apm {

/// Decentralized objective (1/m) sum_i F_i with F_i = f_i + h_i.
///
/// f_i is L-smooth and mu-strongly convex; h_i is convex and M-Lipschitz.
/// Either part may be identically zero. The raw oracles here do not count
/// work; use gradient()/subgradient() below inside algorithms.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual int agents() const = 0;
  virtual int dim() const = 0;

  virtual bool has_smooth_part() const = 0;
  virtual bool has_nonsmooth_part() const = 0;

  /// L; zero when f is identically zero.
  virtual double smoothness() const = 0;
  virtual double strong_convexity() const = 0;
  /// M; zero when h is identically zero.
  virtual double lipschitz() const = 0;

  virtual double local_objective(int agent, const Vector& x) const = 0;
  virtual AgentMatrix smooth_gradient(const AgentMatrix& x) const = 0;
  virtual AgentMatrix nonsmooth_subgradient(const AgentMatrix& x) const = 0;

  virtual bool has_cheap_prox() const { return false; }
  /// Row-wise argmin_u step*h_i(u) + 1/2 ||u - v_(i)||^2.
  virtual AgentMatrix prox(const AgentMatrix& v, double step) const;

  /// Centralized objective (1/m) sum_i F_i(x).
  double objective(const Vector& x) const;
};

/// Gradient of f at every agent; one gradient evaluation.
AgentMatrix gradient(const Problem& problem, const AgentMatrix& x, Counters& counters);

/// One subgradient of h at every agent; one subgradient evaluation.
AgentMatrix subgradient(const Problem& problem, const AgentMatrix& x, Counters& counters);

struct Reference {
  Vector x_star;
  double f_star = 0.0;
};

/// Parameters a generated instance was drawn with.
struct GenerationInfo {
  std::string kind;
  int samples = 0;
  int dim = 0;
  int agents = 0;
  double mu = 0.0;
  std::uint64_t seed = 0;
};

/// f_i(x) = 1/2 ||A_i^T x - b_i||^2 + mu/2 ||x||^2, optionally plus
/// h_i(x) = lambda ||x||_1.
class LeastSquares final : public Problem {
 public:
  /// `a` holds the n x (N/m) blocks A_i, `b` the matching targets.
  /// L is computed as max_i lambda_max(A_i A_i^T) + mu.
  LeastSquares(std::vector<Matrix> a, std::vector<Vector> b, double mu, double l1_weight = 0.0);

  int agents() const override { return static_cast<int>(a_.size()); }
  int dim() const override { return static_cast<int>(a_.front().rows()); }
  bool has_smooth_part() const override { return true; }
  bool has_nonsmooth_part() const override { return l1_ > 0.0; }
  double smoothness() const override { return smoothness_; }
  double strong_convexity() const override { return mu_; }
  double lipschitz() const override;

  double local_objective(int agent, const Vector& x) const override;
  double local_smooth(int agent, const Vector& x) const;
  Vector local_gradient(int agent, const Vector& x) const;
  AgentMatrix smooth_gradient(const AgentMatrix& x) const override;
  AgentMatrix nonsmooth_subgradient(const AgentMatrix& x) const override;

  bool has_cheap_prox() const override { return true; }
  AgentMatrix prox(const AgentMatrix& v, double step) const override;

  const std::vector<Matrix>& blocks() const noexcept { return a_; }
  const std::vector<Vector>& targets() const noexcept { return b_; }
  double l1_weight() const noexcept { return l1_; }

 private:
  std::vector<Matrix> a_;
  std::vector<Vector> b_;
  double mu_;
  double l1_;
  double smoothness_;
};

/// h_i(x) = sum_j max{0, 1 - b_ij a_ij^T x} over the agent's samples; f = 0.
class HingeLoss final : public Problem {
 public:
  HingeLoss(std::vector<Matrix> a, std::vector<Vector> labels);

  int agents() const override { return static_cast<int>(a_.size()); }
  int dim() const override { return static_cast<int>(a_.front().rows()); }
  bool has_smooth_part() const override { return false; }
  bool has_nonsmooth_part() const override { return true; }
  double smoothness() const override { return 0.0; }
  double strong_convexity() const override { return 0.0; }
  double lipschitz() const override { return lipschitz_; }

  double local_objective(int agent, const Vector& x) const override;
  /// Sum over active samples (margin < 1) of -b_ij a_ij; margin exactly 1
  /// contributes nothing.
  Vector local_subgradient(int agent, const Vector& x) const;
  AgentMatrix smooth_gradient(const AgentMatrix& x) const override;
  AgentMatrix nonsmooth_subgradient(const AgentMatrix& x) const override;

  const std::vector<Matrix>& blocks() const noexcept { return a_; }
  const std::vector<Vector>& labels() const noexcept { return b_; }

 private:
  std::vector<Matrix> a_;
  std::vector<Vector> b_;
  double lipschitz_;
};

struct LeastSquaresInstance {
  std::shared_ptr<const LeastSquares> problem;
  Reference reference;
  GenerationInfo info;
  Vector planted;
};

struct HingeInstance {
  std::shared_ptr<const HingeLoss> problem;
  Reference reference;
  GenerationInfo info;
  Vector planted;
};

/// Options for the subgradient-descent reference of nonsmooth problems.
struct SubgradientReferenceOptions {
  long iterations = 1'000'000;
  /// Length of each trial run of the step-constant bracket search.
  long tuning_iterations = 20'000;
  /// Warm restarts from the best iterate, each with a re-tuned constant.
  int restarts = 2;
};

/// Normal-equation solve of the centralized least-squares problem.
/// Requires l1_weight == 0.
Reference centralized_reference(const LeastSquares& problem);

/// Centralized subgradient descent x <- x - (c/sqrt(t)) g with c picked by a
/// bracketed search, restarted from the best iterate; returns the best
/// iterate. Stops early on a zero subgradient (exact minimizer).
Reference centralized_reference(const HingeLoss& problem,
                                const SubgradientReferenceOptions& options = {});

/// A_i uniform on [0,1]^(n x N/m) with unit columns, planted x ~ N(0, I),
/// b_i = A_i^T x. Throws IndivisibleData unless m divides N.
LeastSquaresInstance gen_least_squares(int samples, int dim, int agents, double mu,
                                       std::uint64_t seed);

/// Same design, labels b_i = sign(A_i^T x) with sign(0) = +1.
HingeInstance gen_hinge_svm(int samples, int dim, int agents, std::uint64_t seed,
                            const SubgradientReferenceOptions& options = {});

/// Instance (data, reference and provenance) as JSON.
std::string to_json(const LeastSquaresInstance& instance);
std::string to_json(const HingeInstance& instance);

struct ProblemDocument {
  GenerationInfo info;
  std::shared_ptr<const Problem> problem;
  Reference reference;
};

ProblemDocument problem_from_json(std::string_view text);

}  // namespace apm
