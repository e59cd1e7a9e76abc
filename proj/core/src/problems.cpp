#include "apm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

namespace apm {

AgentMatrix Problem::prox(const AgentMatrix&, double) const {
  throw NoCheapProx("problem has no closed-form proximal mapping");
}

double Problem::objective(const Vector& x) const {
  double total = 0.0;
  for (int i = 0; i < agents(); ++i) total += local_objective(i, x);
  return total / agents();
}

AgentMatrix gradient(const Problem& problem, const AgentMatrix& x, Counters& counters) {
  ++counters.grad_evals;
  return problem.smooth_gradient(x);
}

AgentMatrix subgradient(const Problem& problem, const AgentMatrix& x, Counters& counters) {
  ++counters.subgrad_evals;
  return problem.nonsmooth_subgradient(x);
}

namespace {

void check_blocks(const std::vector<Matrix>& a, const std::vector<Vector>& b) {
  if (a.empty()) throw InvalidArgument("problem needs at least one agent");
  if (a.size() != b.size()) throw InvalidArgument("data and targets disagree on agent count");
  const auto n = a.front().rows();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != n || a[i].rows() == 0) throw InvalidArgument("data blocks disagree on dimension");
    if (a[i].cols() != b[i].size()) throw InvalidArgument("data block and targets disagree on sample count");
    if (!a[i].allFinite() || !b[i].allFinite()) throw InvalidArgument("non-finite problem data");
  }
}

double top_eigenvalue_gram(const Matrix& a) {
  // lambda_max(A A^T) = lambda_max(A^T A); the latter is (N/m) x (N/m).
  if (a.cols() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.transpose() * a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

LeastSquares::LeastSquares(std::vector<Matrix> a, std::vector<Vector> b, double mu, double l1_weight)
    : a_(std::move(a)), b_(std::move(b)), mu_(mu), l1_(l1_weight) {
  check_blocks(a_, b_);
  if (!(mu_ >= 0.0)) throw InvalidArgument("mu must be non-negative");
  if (!(l1_ >= 0.0)) throw InvalidArgument("l1 weight must be non-negative");
  double top = 0.0;
  for (const Matrix& ai : a_) top = std::max(top, top_eigenvalue_gram(ai));
  smoothness_ = top + mu_;
}

double LeastSquares::lipschitz() const { return l1_ * std::sqrt(static_cast<double>(dim())); }

double LeastSquares::local_smooth(int agent, const Vector& x) const {
  const Vector r = a_[agent].transpose() * x - b_[agent];
  return 0.5 * r.squaredNorm() + 0.5 * mu_ * x.squaredNorm();
}

double LeastSquares::local_objective(int agent, const Vector& x) const {
  return local_smooth(agent, x) + l1_ * x.lpNorm<1>();
}

Vector LeastSquares::local_gradient(int agent, const Vector& x) const {
  const Vector r = a_[agent].transpose() * x - b_[agent];
  return a_[agent] * r + mu_ * x;
}

AgentMatrix LeastSquares::smooth_gradient(const AgentMatrix& x) const {
  AgentMatrix g(x.rows(), x.cols());
  for (int i = 0; i < agents(); ++i) g.row(i) = local_gradient(i, x.row(i).transpose()).transpose();
  return g;
}

AgentMatrix LeastSquares::nonsmooth_subgradient(const AgentMatrix& x) const {
  return l1_ * x.unaryExpr([](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); });
}

AgentMatrix LeastSquares::prox(const AgentMatrix& v, double step) const {
  const double t = step * l1_;
  if (t == 0.0) return v;
  return v.unaryExpr([t](double e) { return soft_threshold(e, t); });
}

HingeLoss::HingeLoss(std::vector<Matrix> a, std::vector<Vector> labels)
    : a_(std::move(a)), b_(std::move(labels)), lipschitz_(0.0) {
  check_blocks(a_, b_);
  for (std::size_t i = 0; i < a_.size(); ++i) {
    for (int j = 0; j < b_[i].size(); ++j) {
      if (b_[i](j) != 1.0 && b_[i](j) != -1.0) throw InvalidArgument("hinge labels must be +1 or -1");
    }
    lipschitz_ = std::max(lipschitz_, a_[i].colwise().norm().sum());
  }
}

double HingeLoss::local_objective(int agent, const Vector& x) const {
  const Vector margins = b_[agent].cwiseProduct(a_[agent].transpose() * x);
  return (1.0 - margins.array()).max(0.0).sum();
}

Vector HingeLoss::local_subgradient(int agent, const Vector& x) const {
  const Matrix& a = a_[agent];
  const Vector& b = b_[agent];
  const Vector margins = b.cwiseProduct(a.transpose() * x);
  Vector g = Vector::Zero(a.rows());
  for (int j = 0; j < margins.size(); ++j) {
    if (margins(j) < 1.0) g -= b(j) * a.col(j);
  }
  return g;
}

AgentMatrix HingeLoss::smooth_gradient(const AgentMatrix& x) const {
  return AgentMatrix::Zero(x.rows(), x.cols());
}

AgentMatrix HingeLoss::nonsmooth_subgradient(const AgentMatrix& x) const {
  AgentMatrix g(x.rows(), x.cols());
  for (int i = 0; i < agents(); ++i) g.row(i) = local_subgradient(i, x.row(i).transpose()).transpose();
  return g;
}

Reference centralized_reference(const LeastSquares& problem) {
  if (problem.l1_weight() > 0.0) {
    throw InvalidArgument("least-squares reference does not support an l1 term");
  }
  const int n = problem.dim();
  const int m = problem.agents();
  Matrix h = Matrix::Zero(n, n);
  Vector r = Vector::Zero(n);
  for (int i = 0; i < m; ++i) {
    const Matrix& a = problem.blocks()[i];
    h.noalias() += a * a.transpose();
    r.noalias() += a * problem.targets()[i];
  }
  h.diagonal().array() += m * problem.strong_convexity();

  Vector x;
  if (problem.strong_convexity() > 0.0) {
    Eigen::LDLT<Matrix> ldlt(h);
    if (ldlt.info() != Eigen::Success) throw SingularSystem("normal equations: factorization failed");
    x = ldlt.solve(r);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(h);
    cod.setThreshold(1e-12);
    x = cod.solve(r);
    const double residual = (h * x - r).norm();
    if (cod.rank() < n && residual > 1e-8 * std::max(1.0, r.norm())) {
      throw SingularSystem("normal equations are rank-deficient and inconsistent");
    }
  }
  return {x, problem.objective(x)};
}

namespace {

struct StackedHinge {
  Matrix a;   // n x N
  Vector b;   // N
  double scale;  // 1/m
};

StackedHinge stack(const HingeLoss& problem) {
  long total = 0;
  for (const auto& blk : problem.blocks()) total += blk.cols();
  StackedHinge s{Matrix(problem.dim(), total), Vector(total), 1.0 / problem.agents()};
  long col = 0;
  for (int i = 0; i < problem.agents(); ++i) {
    const auto& blk = problem.blocks()[i];
    s.a.middleCols(col, blk.cols()) = blk;
    s.b.segment(col, blk.cols()) = problem.labels()[i];
    col += blk.cols();
  }
  return s;
}

struct DescentResult {
  Vector x;
  double value;
};

// x <- x - (c / sqrt(t)) g on (1/m) sum of hinge losses, best iterate kept.
DescentResult subgradient_descent(const StackedHinge& s, double c, long iterations, const Vector& x0) {
  Vector x = x0;
  Vector best = x;
  double best_value = std::numeric_limits<double>::infinity();
  Vector g(s.a.rows());
  for (long t = 1; t <= iterations; ++t) {
    const Vector margins = s.b.cwiseProduct(s.a.transpose() * x);
    double value = 0.0;
    g.setZero();
    for (long j = 0; j < margins.size(); ++j) {
      if (margins(j) < 1.0) {
        value += 1.0 - margins(j);
        g -= s.b(j) * s.a.col(j);
      }
    }
    value *= s.scale;
    g *= s.scale;
    if (value < best_value) {
      best_value = value;
      best = x;
    }
    if (g.squaredNorm() == 0.0) break;  // zero subgradient: x is a minimizer
    x -= (c / std::sqrt(static_cast<double>(t))) * g;
  }
  return {best, best_value};
}

}  // namespace

Reference centralized_reference(const HingeLoss& problem, const SubgradientReferenceOptions& options) {
  if (options.iterations < 1 || options.tuning_iterations < 1 || options.restarts < 0) {
    throw InvalidArgument("subgradient reference needs positive iteration counts");
  }
  const StackedHinge s = stack(problem);

  // Bracket the step constant over a geometric grid around `center`, then
  // refine once around the winner.
  auto bracket = [&](const Vector& x0, double center) {
    double best_c = center;
    double best_value = std::numeric_limits<double>::infinity();
    auto try_c = [&](double c) {
      const double v = subgradient_descent(s, c, options.tuning_iterations, x0).value;
      if (v < best_value) {
        best_value = v;
        best_c = c;
      }
    };
    for (int e = -6; e <= 4; ++e) try_c(center * std::pow(10.0, 0.5 * e));
    const double mid = best_c;
    for (double f : {0.5, 0.75, 1.5, 2.0}) try_c(mid * f);
    return best_c;
  };

  const Vector zero = Vector::Zero(problem.dim());
  double c = bracket(zero, 1.0);
  DescentResult result = subgradient_descent(s, c, options.iterations, zero);
  // Restarts from the best point shrink the effective initial distance,
  // which is what limits the c/sqrt(t) rate.
  for (int r = 0; r < options.restarts && result.value > 0.0; ++r) {
    c = bracket(result.x, 0.1 * c);
    DescentResult next = subgradient_descent(s, c, options.iterations, result.x);
    if (next.value < result.value) result = std::move(next);
  }
  return {result.x, problem.objective(result.x)};
}

namespace {

struct Design {
  std::vector<Matrix> a;
  Vector planted;
};

Design generate_design(int samples, int dim, int agents, std::uint64_t seed) {
  if (agents < 1 || samples < 1 || dim < 1) throw InvalidArgument("N, n and m must be positive");
  if (samples % agents != 0) {
    throw IndivisibleData("sample count " + std::to_string(samples) + " is not divisible by " +
                          std::to_string(agents) + " agents");
  }
  const int local = samples / agents;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Design d;
  d.a.reserve(agents);
  for (int i = 0; i < agents; ++i) {
    Matrix a(dim, local);
    for (int c = 0; c < local; ++c) {
      for (int r = 0; r < dim; ++r) a(r, c) = unit(rng);
      const double norm = a.col(c).norm();
      if (norm == 0.0) throw Error("degenerate all-zero column drawn");
      a.col(c) /= norm;
    }
    d.a.push_back(std::move(a));
  }
  d.planted = Vector(dim);
  for (int r = 0; r < dim; ++r) d.planted(r) = gauss(rng);
  return d;
}

}  // namespace

LeastSquaresInstance gen_least_squares(int samples, int dim, int agents, double mu,
                                       std::uint64_t seed) {
  if (!(mu >= 0.0)) throw InvalidArgument("mu must be non-negative");
  Design d = generate_design(samples, dim, agents, seed);
  std::vector<Vector> b;
  b.reserve(agents);
  for (const Matrix& a : d.a) b.push_back(a.transpose() * d.planted);
  auto problem = std::make_shared<const LeastSquares>(std::move(d.a), std::move(b), mu);
  Reference ref = centralized_reference(*problem);
  return {std::move(problem), std::move(ref), {"least_squares", samples, dim, agents, mu, seed},
          std::move(d.planted)};
}

HingeInstance gen_hinge_svm(int samples, int dim, int agents, std::uint64_t seed,
                            const SubgradientReferenceOptions& options) {
  Design d = generate_design(samples, dim, agents, seed);
  std::vector<Vector> labels;
  labels.reserve(agents);
  for (const Matrix& a : d.a) {
    const Vector scores = a.transpose() * d.planted;
    labels.push_back(scores.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; }));
  }
  auto problem = std::make_shared<const HingeLoss>(std::move(d.a), std::move(labels));
  Reference ref = centralized_reference(*problem, options);
  return {std::move(problem), std::move(ref), {"hinge", samples, dim, agents, 0.0, seed},
          std::move(d.planted)};
}

namespace {

nlohmann::json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

nlohmann::json matrix_json(const Matrix& a) {
  auto rows = nlohmann::json::array();
  for (int r = 0; r < a.rows(); ++r) rows.push_back(vector_json(a.row(r).transpose()));
  return rows;
}

Matrix matrix_from(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j.at(r).size()) != cols) throw InvalidArgument("ragged matrix in problem json");
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = j.at(r).at(c).get<double>();
  }
  return a;
}

nlohmann::json info_json(const GenerationInfo& info) {
  return {{"kind", info.kind}, {"N", info.samples}, {"n", info.dim},
          {"m", info.agents},  {"mu", info.mu},     {"seed", info.seed}};
}

nlohmann::json common_json(const GenerationInfo& info, const std::vector<Matrix>& a,
                           const std::vector<Vector>& b, const Reference& ref, const Vector& planted) {
  nlohmann::json doc;
  doc["format"] = "apm-problem";
  doc["version"] = 1;
  doc["kind"] = info.kind;
  doc["generation"] = info_json(info);
  auto blocks = nlohmann::json::array();
  for (std::size_t i = 0; i < a.size(); ++i) {
    blocks.push_back({{"A", matrix_json(a[i])}, {"b", vector_json(b[i])}});
  }
  doc["blocks"] = std::move(blocks);
  doc["reference"] = {{"x_star", vector_json(ref.x_star)}, {"f_star", ref.f_star}};
  doc["planted"] = vector_json(planted);
  return doc;
}

}  // namespace

std::string to_json(const LeastSquaresInstance& inst) {
  auto doc = common_json(inst.info, inst.problem->blocks(), inst.problem->targets(), inst.reference,
                         inst.planted);
  doc["mu"] = inst.problem->strong_convexity();
  doc["l1"] = inst.problem->l1_weight();
  doc["L"] = inst.problem->smoothness();
  return doc.dump(1);
}

std::string to_json(const HingeInstance& inst) {
  auto doc = common_json(inst.info, inst.problem->blocks(), inst.problem->labels(), inst.reference,
                         inst.planted);
  doc["M"] = inst.problem->lipschitz();
  return doc.dump(1);
}

ProblemDocument problem_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.value("format", "") != "apm-problem") throw InvalidArgument("not an apm-problem document");
    const auto& gen = doc.at("generation");
    ProblemDocument out;
    out.info = {gen.at("kind").get<std::string>(), gen.at("N").get<int>(), gen.at("n").get<int>(),
                gen.at("m").get<int>(), gen.at("mu").get<double>(), gen.at("seed").get<std::uint64_t>()};
    std::vector<Matrix> a;
    std::vector<Vector> b;
    for (const auto& blk : doc.at("blocks")) {
      a.push_back(matrix_from(blk.at("A")));
      b.push_back(vector_from(blk.at("b")));
    }
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "least_squares") {
      out.problem = std::make_shared<const LeastSquares>(std::move(a), std::move(b), doc.at("mu").get<double>(),
                                                         doc.value("l1", 0.0));
    } else if (kind == "hinge") {
      out.problem = std::make_shared<const HingeLoss>(std::move(a), std::move(b));
    } else {
      throw InvalidArgument("unknown problem kind '" + kind + "'");
    }
    out.reference = {vector_from(doc.at("reference").at("x_star")),
                     doc.at("reference").at("f_star").get<double>()};
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("problem json: ") + e.what());
  }
}

}  // namespace apm
