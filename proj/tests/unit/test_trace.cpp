#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "apm/trace.hpp"
#include "oracles.hpp"

using apm::AgentMatrix;
using apm::Vector;

TEST(Metrics, ZeroAtOptimalConsensus) {
  auto inst = apm::gen_least_squares(40, 5, 4, 0.1, 1);
  AgentMatrix x = inst.reference.x_star.transpose().replicate(4, 1);
  auto m = apm::evaluate_metrics(x, *inst.problem, inst.reference);
  EXPECT_NEAR(m.obj_gap, 0.0, 1e-14);
  EXPECT_EQ(m.consensus_violation, 0.0);
}

TEST(Metrics, AlternatingPerturbation) {
  auto inst = apm::gen_least_squares(40, 5, 4, 0.1, 2);
  const Vector v = Eigen::VectorXd::LinSpaced(5, -1.0, 2.0);
  AgentMatrix x(4, 5);
  for (int i = 0; i < 4; ++i) x.row(i) = (inst.reference.x_star + (i % 2 ? -v : v)).transpose();
  auto m = apm::evaluate_metrics(x, *inst.problem, inst.reference);
  EXPECT_NEAR(m.consensus_violation, v.squaredNorm(), 1e-12);
  // Evaluated at the average, which is x*.
  EXPECT_NEAR(m.obj_gap, 0.0, 1e-14);
}

TEST(Metrics, ViolationIsScaledDisagreementNorm) {
  auto inst = apm::gen_least_squares(40, 5, 8, 0.1, 3);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    AgentMatrix x = oracle::gaussian(rng, 8, 5);
    auto m = apm::evaluate_metrics(x, *inst.problem, inst.reference);
    EXPECT_NEAR(m.consensus_violation, apm::disagreement(x).squaredNorm() / 8.0, 1e-12);
  }
}

TEST(Recorder, CadenceKeepsLastRow) {
  auto inst = apm::gen_least_squares(40, 5, 4, 0.1, 1);
  apm::TraceRecorder rec(*inst.problem, inst.reference, {4, false}, 10);
  apm::Counters c;
  for (int k = 1; k <= 10; ++k) {
    c.grad_evals = k;
    rec.record(k, c, AgentMatrix::Zero(4, 5));
  }
  auto trace = rec.finish(apm::RunTrace{});
  ASSERT_EQ(trace.rows.size(), 3u);
  EXPECT_EQ(trace.rows[0].k, 4);
  EXPECT_EQ(trace.rows[1].k, 8);
  EXPECT_EQ(trace.rows[2].k, 10);
  EXPECT_EQ(trace.rows[2].grad_evals, 10u);
  EXPECT_EQ(trace.rows[2].wall_ms, 0.0);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(apm::format_double(0.1), "0.1");
  EXPECT_EQ(apm::format_double(1e-300), "1e-300");
  EXPECT_EQ(apm::format_double(3.0), "3");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(oracle::uniform(rng, -1, 1), static_cast<int>(oracle::uniform(rng, -200, 200)));
    EXPECT_EQ(std::stod(apm::format_double(v)), v);
  }
}

TEST(TraceCsv, EmptyTraceIsMetadataAndHeader) {
  apm::RunTrace t;
  t.set("seed", "3");
  t.set("gap", 0.25);
  std::ostringstream out;
  apm::write_trace_csv(t, out);
  EXPECT_EQ(out.str(), std::string("# seed: 3\n# gap: 0.25\n") + apm::kTraceHeader + "\n");
}

TEST(TraceCsv, OneRowGivesTwoDataBearingLines) {
  apm::RunTrace t;
  t.set("algorithm", "x");
  t.rows.push_back({1, 2, 3, 4, 0.5, 0.25, 0.0});
  std::ostringstream out;
  apm::write_trace_csv(t, out);
  std::istringstream in(out.str());
  std::string line;
  int comment = 0, data = 0;
  while (std::getline(in, line)) (line.rfind('#', 0) == 0 ? comment : data)++;
  EXPECT_EQ(comment, 1);
  EXPECT_EQ(data, 2);
}

TEST(TraceCsv, RoundTripIsExact) {
  std::mt19937_64 rng(7);
  apm::RunTrace t;
  t.set("config", "{\"a\":1,\"b\":\"x: y\"}");
  t.set("R1", 4.784567158396064);
  for (int k = 1; k <= 200; ++k) {
    t.rows.push_back({k, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(3 * k),
                      static_cast<std::uint64_t>(k * k), std::exp(oracle::uniform(rng, -40, 3)),
                      std::exp(oracle::uniform(rng, -40, 3)), oracle::uniform(rng, 0, 1000)});
  }
  t.rows.push_back({201, 0, 0, 0, 0.0, std::numeric_limits<double>::denorm_min(), 0.0});
  std::stringstream buf;
  apm::write_trace_csv(t, buf);
  apm::RunTrace back = apm::read_trace_csv(buf);
  EXPECT_EQ(back.metadata, t.metadata);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(TraceCsv, FileRoundTripAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "apm_trace_test";
  std::filesystem::create_directories(dir);
  apm::RunTrace t;
  t.rows.push_back({1, 1, 0, 1, 0.125, 1e-9, 0.0});
  apm::write_trace_csv(t, dir / "t.csv");
  EXPECT_EQ(apm::read_trace_csv(dir / "t.csv").rows, t.rows);
  try {
    apm::write_trace_csv(t, dir / "missing" / "t.csv");
    FAIL() << "expected an IO error";
  } catch (const apm::Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
  EXPECT_THROW(apm::read_trace_csv(dir / "nope.csv"), apm::Error);
  std::istringstream bad(std::string(apm::kTraceHeader) + "\n1,2,3\n");
  EXPECT_THROW(apm::read_trace_csv(bad), apm::Error);
  std::filesystem::remove_all(dir);
}
