#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Sparse>

#include "apm/types.hpp"

namespace apm {

struct Edge {
  int u = 0;
  int v = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Undirected simple graph over agents 0..m-1.
///
/// Edges are stored normalized (u < v) and sorted. Construction rejects
/// self-loops, duplicate edges and out-of-range endpoints; connectivity is a
/// query, not a construction invariant, so generators can test candidates.
class Network {
 public:
  Network(int agents, std::vector<Edge> edges);

  int agents() const noexcept { return agents_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<int>& degrees() const noexcept { return degrees_; }
  const std::vector<std::vector<int>>& neighbors() const noexcept { return neighbors_; }

  bool adjacent(int i, int j) const;
  bool connected() const;

 private:
  int agents_;
  std::vector<Edge> edges_;
  std::vector<int> degrees_;
  std::vector<std::vector<int>> neighbors_;
};

/// Samples G(m, p). A disconnected draw is discarded and resampled with
/// seed+1, seed+2, ... for at most `max_retries` extra attempts.
Network build_erdos_renyi(int agents, double p, std::uint64_t seed, int max_retries = 100);

struct SpectralGap {
  double sigma2 = 0.0;
  double gap = 1.0;
};

/// Second-largest eigenvalue of a symmetric PSD mixing matrix and 1 - sigma2.
/// Throws DegenerateGap when the gap is at most 1e-12.
SpectralGap spectral_gap(const Matrix& w);

/// Symmetric doubly-stochastic mixing matrix with its spectral data cached.
class WeightMatrix {
 public:
  /// Validates shape and symmetry and computes the spectrum.
  static WeightMatrix from_dense(Matrix entries);

  int agents() const noexcept { return static_cast<int>(dense_.rows()); }
  const Matrix& dense() const noexcept { return dense_; }
  const Eigen::SparseMatrix<double>& sparse() const noexcept { return sparse_; }
  double sigma2() const noexcept { return spectrum_.sigma2; }
  double gap() const noexcept { return spectrum_.gap; }
  SpectralGap spectrum() const noexcept { return spectrum_; }

  /// W x, one neighbor exchange.
  AgentMatrix mix(const AgentMatrix& x) const;
  /// (I - W) x, i.e. U^2 x.
  AgentMatrix laplacian(const AgentMatrix& x) const;

 private:
  WeightMatrix(Matrix dense, SpectralGap spectrum);

  Matrix dense_;
  Eigen::SparseMatrix<double> sparse_;
  SpectralGap spectrum_;
};

inline SpectralGap spectral_gap(const WeightMatrix& w) { return w.spectrum(); }

/// Plain Metropolis weights: 1/(1+max(deg_i,deg_j)) on edges, diagonal fills
/// each row to one.
Matrix metropolis_weights(const Network& net);

/// W = (I + M)/2 for the Metropolis matrix M of a connected network.
WeightMatrix lazy_metropolis_weights(const Network& net);

/// Invariant residuals of a weight matrix, for diagnostics and tests.
struct WeightDiagnostics {
  double symmetry_error = 0.0;      // max |W - W^T|
  double row_sum_error = 0.0;       // max |W 1 - 1|
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double top_eigvec_error = 0.0;    // ||W 1 - 1||_inf, same as row sums for symmetric W
  bool sparsity_matches = true;     // nonzeros exactly on edges and diagonal
};

WeightDiagnostics diagnose(const WeightMatrix& w, const Network* net = nullptr);

/// Row average alpha(x) = (1/m) sum_i x_(i), as a column vector.
Vector row_average(const AgentMatrix& x);

/// Pi x = x - 1 alpha(x)^T.
AgentMatrix disagreement(const AgentMatrix& x);

/// ||U x||_F^2 = <x, (I - W) x>; U is never formed.
double u_quadratic_norm(const WeightMatrix& w, const AgentMatrix& x);

/// Network (and optionally W) as self-describing JSON. Doubles are written
/// with round-trip precision.
std::string to_json(const Network& net, const WeightMatrix* weights = nullptr);

struct NetworkDocument {
  Network network;
  std::optional<Matrix> weights;
};

NetworkDocument network_from_json(std::string_view text);

}  // namespace apm
