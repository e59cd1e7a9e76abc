#pragma once

// Independent reference computations shared by the unit and acceptance
// tests. Nothing here calls into the library's algorithm code.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "apm/network.hpp"
#include "apm/problems.hpp"

namespace oracle {

using apm::Matrix;
using apm::Vector;

inline Matrix gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix out(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) out(i, j) = g(rng);
  return out;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random connected graph: a random spanning tree plus extra edges.
inline apm::Network random_connected(std::mt19937_64& rng, int m, double extra_p) {
  std::vector<apm::Edge> edges;
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 1; i < m; ++i) {
    const int parent = order[std::uniform_int_distribution<int>(0, i - 1)(rng)];
    edges.push_back({std::min(parent, order[i]), std::max(parent, order[i])});
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const apm::Edge e{i, j};
      if (std::find(edges.begin(), edges.end(), e) == edges.end() && uniform(rng, 0, 1) < extra_p)
        edges.push_back(e);
    }
  return apm::Network(m, edges);
}

/// Eigenvalues of a symmetric matrix, ascending, from Jacobi rotations.
inline Vector jacobi_eigenvalues(Matrix a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  Vector ev = a.diagonal();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

/// Inner-iteration formula evaluated with 50 significant digits.
inline int inner_iters_hp(double beta0, double theta_pen, double eps, double pi_norm_sq,
                          double sigma2) {
  using hp = boost::multiprecision::cpp_bin_float_50;
  if (sigma2 == 0.0) return 0;
  const hp ratio = hp(beta0) * hp(pi_norm_sq) / (hp(2) * hp(theta_pen) * hp(eps));
  if (ratio <= 1) return 0;
  const hp denom = -2 * log(1 - sqrt(1 - hp(sigma2)));
  const hp value = log(ratio) / denom;
  return static_cast<int>(ceil(value));
}

/// Golden-section minimizer of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             int iterations = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// argmin_u t |u| + 1/2 (u - v)^2 by comparing the three stationary
/// candidates of the piecewise quadratic.
inline double l1_prox_candidates(double v, double t) {
  auto obj = [&](double u) { return t * std::abs(u) + 0.5 * (u - v) * (u - v); };
  double best = 0.0;
  for (double u : {v - t, v + t})
    if (obj(u) < obj(best)) best = u;
  return best;
}

/// Conjugate gradients for a symmetric positive definite operator on
/// m x n matrices.
inline Matrix conjugate_gradient(const std::function<Matrix(const Matrix&)>& op, const Matrix& rhs,
                                 double tol = 1e-15, int max_iter = 10000) {
  Matrix x = Matrix::Zero(rhs.rows(), rhs.cols());
  Matrix r = rhs;
  Matrix p = r;
  double rr = r.squaredNorm();
  const double stop = tol * tol * std::max(1.0, rhs.squaredNorm());
  for (int it = 0; it < max_iter && rr > stop; ++it) {
    const Matrix ap = op(p);
    const double alpha = rr / (p.array() * ap.array()).sum();
    x += alpha * p;
    r -= alpha * ap;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return x;
}

/// Smooth least-squares pieces computed straight from the data.
struct LocalQuadratic {
  std::vector<Matrix> a;
  std::vector<Vector> b;
  double mu = 0.0;

  double value(int i, const Vector& x) const {
    return 0.5 * (a[i].transpose() * x - b[i]).squaredNorm() + 0.5 * mu * x.squaredNorm();
  }
  double total(const Vector& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += value(static_cast<int>(i), x);
    return s / static_cast<double>(a.size());
  }
  Vector grad(int i, const Vector& x) const {
    return a[i] * (a[i].transpose() * x - b[i]) + mu * x;
  }
};

/// Accelerated gradient x+ = y - g(y)/L with y = x + c_k (x - x_prev) for a
/// given momentum sequence c_0, c_1, ...
inline std::vector<Vector> accelerated_gradient(const std::function<Vector(const Vector&)>& grad,
                                                double L, const Vector& x0,
                                                const std::vector<double>& momentum) {
  std::vector<Vector> out{x0};
  Vector x = x0, x_prev = x0;
  for (double c : momentum) {
    const Vector y = x + c * (x - x_prev);
    x_prev = x;
    x = y - grad(y) / L;
    out.push_back(x);
  }
  return out;
}

/// Constant momentum (1 - q)/(1 + q), q = sqrt(mu/L).
inline std::vector<double> strongly_convex_momentum(double L, double mu, int iters) {
  const double q = std::sqrt(mu / L);
  std::vector<double> c(iters, (1.0 - q) / (1.0 + q));
  if (iters > 0) c[0] = 0.0;
  return c;
}

/// theta_k = 1/t_k with t_0 = 1, t_{k+1} = (1 + sqrt(1 + 4 t_k^2))/2, and
/// momentum theta_k (1 - theta_{k-1}) / theta_{k-1}.
inline std::vector<double> vanishing_momentum(int iters) {
  std::vector<double> t{1.0};
  while (static_cast<int>(t.size()) < iters + 1) t.push_back((1.0 + std::sqrt(1.0 + 4.0 * t.back() * t.back())) / 2.0);
  std::vector<double> c(iters, 0.0);
  for (int k = 1; k < iters; ++k) c[k] = (1.0 / t[k]) * (t[k - 1] - 1.0);
  return c;
}

/// max c^T v s.t. A v <= rhs, v >= 0, with rhs >= 0 so the origin is a
/// feasible start. Dense tableau, Bland's rule. Returns the optimal value.
inline double simplex_max(const Matrix& a, const Vector& rhs, const Vector& c) {
  const int rows = static_cast<int>(a.rows()), cols = static_cast<int>(a.cols());
  Matrix t = Matrix::Zero(rows + 1, cols + rows + 1);
  t.topLeftCorner(rows, cols) = a;
  t.block(0, cols, rows, rows).setIdentity();
  t.col(cols + rows).head(rows) = rhs;
  t.row(rows).head(cols) = -c.transpose();
  std::vector<int> basis(rows);
  for (int r = 0; r < rows; ++r) basis[r] = cols + r;
  constexpr double kEps = 1e-11;
  for (;;) {
    int enter = -1;
    for (int j = 0; j < cols + rows && enter < 0; ++j)
      if (t(rows, j) < -kEps) enter = j;
    if (enter < 0) return t(rows, cols + rows);
    int leave = -1;
    double best = 0.0;
    for (int r = 0; r < rows; ++r) {
      if (t(r, enter) <= kEps) continue;
      const double ratio = t(r, cols + rows) / t(r, enter);
      if (leave < 0 || ratio < best - kEps || (ratio <= best + kEps && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave < 0) throw std::runtime_error("simplex_max: unbounded");
    t.row(leave) /= t(leave, enter);
    for (int r = 0; r <= rows; ++r)
      if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
    basis[leave] = enter;
  }
}

/// Exact hinge optimum (1/m) min_x sum_ij max{0, 1 - b_ij a_ij^T x} through
/// its dual: max sum lambda s.t. sum lambda_j b_j a_j = 0, 0 <= lambda <= 1.
inline double hinge_optimum_lp(const std::vector<Matrix>& blocks, const std::vector<Vector>& labels) {
  Matrix g(blocks.front().rows(), 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Matrix scaled = blocks[i] * labels[i].asDiagonal();
    Matrix next(g.rows(), g.cols() + scaled.cols());
    next << g, scaled;
    g = std::move(next);
  }
  const int n = static_cast<int>(g.rows()), samples = static_cast<int>(g.cols());
  Matrix a(2 * n + samples, samples);
  a << g, -g, Matrix::Identity(samples, samples);
  Vector rhs = Vector::Zero(2 * n + samples);
  rhs.tail(samples).setOnes();
  return simplex_max(a, rhs, Vector::Ones(samples)) / static_cast<double>(blocks.size());
}

}  // namespace oracle
