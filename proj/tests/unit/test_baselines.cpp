#include <cmath>

#include <gtest/gtest.h>

#include "apm/baselines.hpp"
#include "oracles.hpp"

using apm::AgentMatrix;
using apm::Matrix;
using apm::Vector;

namespace {

apm::WeightMatrix single_agent() { return apm::WeightMatrix::from_dense(Matrix::Ones(1, 1)); }

// Traces expose iterates only through metrics, so reductions are compared
// on objective values along the path.
std::vector<double> objective_path(const apm::Problem& p, const std::vector<Vector>& xs) {
  std::vector<double> out;
  for (const auto& x : xs) out.push_back(p.objective(x));
  return out;
}

}  // namespace

TEST(Extra, SingleAgentIsGradientDescent) {
  auto inst = apm::gen_least_squares(30, 6, 1, 0.05, 4);
  const auto& p = *inst.problem;
  const double a = 1.0 / p.smoothness();
  auto trace = apm::run_extra(p, inst.reference, single_agent(), a, 80);
  Vector x = Vector::Zero(6);
  for (int k = 1; k <= 80; ++k) {
    x -= a * p.local_gradient(0, x);
    const double gap = p.objective(x) - inst.reference.f_star;
    ASSERT_NEAR(trace.rows[k - 1].obj_gap, gap, 1e-12 * std::max(1.0, std::abs(gap))) << k;
    ASSERT_EQ(trace.rows[k - 1].consensus_violation, 0.0);
  }
}

TEST(Extra, ConvergesOnDeskInstance) {
  auto inst = apm::gen_least_squares(200, 30, 20, 1e-2, 1);
  auto w = apm::lazy_metropolis_weights(apm::build_erdos_renyi(20, 0.5, 1));
  auto trace = apm::run_extra(*inst.problem, inst.reference, w, 1.0 / inst.problem->smoothness(), 5000,
                              {100, false});
  const auto& last = trace.rows.back();
  EXPECT_EQ(last.k, 5000);
  EXPECT_LT(last.obj_gap, 1e-6);
  EXPECT_LT(last.consensus_violation, 1e-8);
  EXPECT_EQ(last.grad_evals, 5000u);
  EXPECT_EQ(last.comms, 5000u);
}

TEST(Dngd, SingleAgentStronglyConvexReduction) {
  auto inst = apm::gen_least_squares(30, 6, 1, 0.05, 7);
  const auto& p = *inst.problem;
  const double eta = 0.5 / p.smoothness();
  const int K = 80;
  auto trace = apm::run_dngd(p, inst.reference, single_agent(), eta, K);
  // Three-sequence scheme with alpha = sqrt(mu eta) equals the two-sequence
  // scheme with momentum (1 - alpha)/(1 + alpha).
  const auto xs = oracle::accelerated_gradient([&](const Vector& x) { return p.local_gradient(0, x); }, 1.0 / eta,
                                               Vector::Zero(6),
                                               oracle::strongly_convex_momentum(1.0 / eta, p.strong_convexity(), K));
  const auto f = objective_path(p, xs);
  for (int k = 1; k <= K; ++k) {
    const double gap = f[k] - inst.reference.f_star;
    ASSERT_NEAR(trace.rows[k - 1].obj_gap, gap, 1e-11 * std::max(1.0, std::abs(gap))) << k;
  }
  EXPECT_EQ(trace.rows.back().grad_evals, static_cast<std::uint64_t>(K + 1));
  EXPECT_EQ(trace.rows.back().comms, static_cast<std::uint64_t>(K));
}

TEST(Dngd, SingleAgentNonStronglyConvexReduction) {
  auto inst = apm::gen_least_squares(30, 6, 1, 0.0, 8);
  const auto& p = *inst.problem;
  const double eta = 0.5 / p.smoothness();
  const int K = 80;
  auto trace = apm::run_dngd(p, inst.reference, single_agent(), eta, K);
  std::vector<double> alpha{std::sqrt(eta * p.smoothness())};
  for (int k = 1; k <= K; ++k) {
    const double a2 = alpha.back() * alpha.back();
    alpha.push_back((-a2 + std::sqrt(a2 * a2 + 4.0 * a2)) / 2.0);
  }
  std::vector<double> momentum(K, 0.0);
  for (int k = 1; k < K; ++k) momentum[k] = alpha[k] * (1.0 - alpha[k - 1]) / alpha[k - 1];
  const auto xs = oracle::accelerated_gradient([&](const Vector& x) { return p.local_gradient(0, x); }, 1.0 / eta,
                                               Vector::Zero(6), momentum);
  const auto f = objective_path(p, xs);
  for (int k = 1; k <= K; ++k) {
    const double gap = f[k] - inst.reference.f_star;
    ASSERT_NEAR(trace.rows[k - 1].obj_gap, gap, 1e-11 * std::max(1.0, std::abs(gap))) << k;
  }
}

TEST(Dngd, ZeroStepsizeKeepsIterates) {
  auto inst = apm::gen_least_squares(200, 30, 20, 1e-2, 1);
  auto w = apm::lazy_metropolis_weights(apm::build_erdos_renyi(20, 0.5, 1));
  auto trace = apm::run_dngd(*inst.problem, inst.reference, w, 0.0, 20);
  const double start = inst.problem->objective(Vector::Zero(30)) - inst.reference.f_star;
  for (const auto& row : trace.rows) {
    EXPECT_EQ(row.obj_gap, start);
    EXPECT_EQ(row.consensus_violation, 0.0);
  }
}

TEST(Dngd, ConvergesOnDeskInstance) {
  auto inst = apm::gen_least_squares(200, 30, 20, 1e-2, 1);
  auto w = apm::lazy_metropolis_weights(apm::build_erdos_renyi(20, 0.5, 1));
  auto trace = apm::run_dngd(*inst.problem, inst.reference, w, 0.5 / inst.problem->smoothness(), 1000);
  EXPECT_LT(trace.rows.back().obj_gap, 1e-6);
  EXPECT_LT(trace.rows.back().obj_gap, trace.rows[99].obj_gap);
}

TEST(Baselines, RejectNonsmoothProblems) {
  auto hinge = apm::gen_hinge_svm(20, 3, 4, 1, {2000, 100});
  auto w = apm::lazy_metropolis_weights(apm::build_erdos_renyi(4, 0.8, 1));
  EXPECT_THROW(apm::run_extra(*hinge.problem, hinge.reference, w, 0.1, 5), apm::InvalidArgument);
  EXPECT_THROW(apm::run_dngd(*hinge.problem, hinge.reference, w, 0.1, 5), apm::InvalidArgument);
  auto ls = apm::gen_least_squares(20, 3, 4, 0.1, 1);
  EXPECT_THROW(apm::run_extra(*ls.problem, ls.reference, w, -1.0, 5), apm::InvalidArgument);
}
