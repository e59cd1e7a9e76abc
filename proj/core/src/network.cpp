#include "apm/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

namespace apm {

Network::Network(int agents, std::vector<Edge> edges)
    : agents_(agents), degrees_(agents > 0 ? agents : 0), neighbors_(agents > 0 ? agents : 0) {
  if (agents < 1) throw InvalidArgument("network needs at least one agent");
  for (Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= agents || e.v >= agents) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (e.u == e.v) throw InvalidArgument("self-loop on agent " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw InvalidArgument("duplicate edge");
  }
  edges_ = std::move(edges);
  for (const Edge& e : edges_) {
    ++degrees_[e.u];
    ++degrees_[e.v];
    neighbors_[e.u].push_back(e.v);
    neighbors_[e.v].push_back(e.u);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

bool Network::adjacent(int i, int j) const {
  const auto& nb = neighbors_.at(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

bool Network::connected() const {
  std::vector<char> seen(agents_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j : neighbors_[i]) {
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == agents_;
}

Network build_erdos_renyi(int agents, double p, std::uint64_t seed, int max_retries) {
  if (agents < 1) throw InvalidArgument("erdos-renyi: m must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("erdos-renyi: p must lie in [0, 1]");
  if (max_retries < 0) throw InvalidArgument("erdos-renyi: max_retries must be >= 0");

  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Edge> edges;
    for (int i = 0; i < agents; ++i) {
      for (int j = i + 1; j < agents; ++j) {
        if (unit(rng) < p) edges.push_back({i, j});
      }
    }
    Network net(agents, std::move(edges));
    if (net.connected()) return net;
  }
  std::ostringstream msg;
  msg << "no connected G(" << agents << ", " << p << ") sample after " << max_retries + 1
      << " attempts starting at seed " << seed;
  throw NotConnected(msg.str());
}

SpectralGap spectral_gap(const Matrix& w) {
  if (w.rows() != w.cols() || w.rows() == 0) throw InvalidArgument("weight matrix must be square");
  if (w.rows() == 1) return {0.0, 1.0};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed on weight matrix");
  const Vector& ev = solver.eigenvalues();  // ascending
  const double sigma2 = ev(ev.size() - 2);
  const double gap = 1.0 - sigma2;
  if (gap <= 1e-12) {
    std::ostringstream msg;
    msg << "spectral gap " << gap << " is degenerate (sigma2 = " << sigma2 << ")";
    throw DegenerateGap(msg.str());
  }
  return {sigma2, gap};
}

WeightMatrix::WeightMatrix(Matrix dense, SpectralGap spectrum)
    : dense_(std::move(dense)), sparse_(dense_.sparseView()), spectrum_(spectrum) {
  sparse_.makeCompressed();
}

WeightMatrix WeightMatrix::from_dense(Matrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw InvalidArgument("weight matrix must be square and non-empty");
  }
  if (!entries.allFinite()) throw InvalidArgument("weight matrix has non-finite entries");
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) throw InvalidArgument("weight matrix is not symmetric");
  SpectralGap spectrum = spectral_gap(entries);
  return WeightMatrix(std::move(entries), spectrum);
}

AgentMatrix WeightMatrix::mix(const AgentMatrix& x) const { return sparse_ * x; }

AgentMatrix WeightMatrix::laplacian(const AgentMatrix& x) const { return x - sparse_ * x; }

Matrix metropolis_weights(const Network& net) {
  const int m = net.agents();
  const auto& deg = net.degrees();
  Matrix w = Matrix::Zero(m, m);
  for (const Edge& e : net.edges()) {
    const double v = 1.0 / (1.0 + std::max(deg[e.u], deg[e.v]));
    w(e.u, e.v) = v;
    w(e.v, e.u) = v;
  }
  for (int i = 0; i < m; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return w;
}

WeightMatrix lazy_metropolis_weights(const Network& net) {
  if (!net.connected()) throw NotConnected("lazy metropolis weights need a connected network");
  const int m = net.agents();
  Matrix w = 0.5 * (Matrix::Identity(m, m) + metropolis_weights(net));
  return WeightMatrix::from_dense(std::move(w));
}

WeightDiagnostics diagnose(const WeightMatrix& w, const Network* net) {
  const Matrix& d = w.dense();
  const int m = w.agents();
  WeightDiagnostics out;
  out.symmetry_error = (d - d.transpose()).cwiseAbs().maxCoeff();
  const Vector ones = Vector::Ones(m);
  out.row_sum_error = (d * ones - ones).cwiseAbs().maxCoeff();
  out.top_eigvec_error = out.row_sum_error;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(d, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.eigenvalues()(0);
  out.max_eigenvalue = solver.eigenvalues()(m - 1);
  if (net != nullptr) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const bool allowed = i == j || net->adjacent(i, j);
        if ((d(i, j) != 0.0) != allowed) out.sparsity_matches = false;
      }
    }
  }
  return out;
}

Vector row_average(const AgentMatrix& x) { return x.colwise().mean().transpose(); }

AgentMatrix disagreement(const AgentMatrix& x) {
  return x.rowwise() - x.colwise().mean();
}

double u_quadratic_norm(const WeightMatrix& w, const AgentMatrix& x) {
  return (x.array() * w.laplacian(x).array()).sum();
}

std::string to_json(const Network& net, const WeightMatrix* weights) {
  nlohmann::json doc;
  doc["format"] = "apm-network";
  doc["version"] = 1;
  doc["agents"] = net.agents();
  auto edges = nlohmann::json::array();
  for (const Edge& e : net.edges()) edges.push_back({e.u, e.v});
  doc["edges"] = std::move(edges);
  if (weights != nullptr) {
    const Matrix& d = weights->dense();
    auto rows = nlohmann::json::array();
    for (int i = 0; i < d.rows(); ++i) {
      std::vector<double> row(d.cols());
      for (int j = 0; j < d.cols(); ++j) row[j] = d(i, j);
      rows.push_back(row);
    }
    doc["weights"] = std::move(rows);
    doc["sigma2"] = weights->sigma2();
    doc["gap"] = weights->gap();
  }
  return doc.dump(2);
}

NetworkDocument network_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("network json: ") + e.what());
  }
  if (doc.value("format", "") != "apm-network") throw InvalidArgument("not an apm-network document");
  try {
    const int m = doc.at("agents").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    NetworkDocument out{Network(m, std::move(edges)), std::nullopt};
    if (doc.contains("weights")) {
      Matrix w(m, m);
      const auto& rows = doc.at("weights");
      if (rows.size() != static_cast<std::size_t>(m)) throw InvalidArgument("weights: wrong row count");
      for (int i = 0; i < m; ++i) {
        if (rows[i].size() != static_cast<std::size_t>(m)) {
          throw InvalidArgument("weights: wrong column count");
        }
        for (int j = 0; j < m; ++j) w(i, j) = rows[i][j].get<double>();
      }
      out.weights = std::move(w);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("network json: ") + e.what());
  }
}

}  // namespace apm
