#pragma once

#include "apm/network.hpp"
#include "apm/problems.hpp"
#include "apm/trace.hpp"

namespace apm {

/// EXTRA with W~ = (I + W)/2, zero start:
///   x^1     = W x^0 - a grad f(x^0)
///   x^{k+2} = (I + W) x^{k+1} - W~ x^k - a (grad f(x^{k+1}) - grad f(x^k))
/// One gradient and one communication per iteration.
RunTrace run_extra(const Problem& problem, const Reference& reference, const WeightMatrix& w,
                   double stepsize, int iterations, const RunOptions& options = {});

/// Distributed Nesterov gradient descent with gradient tracking.
///
/// mu > 0 uses the constant-momentum recursion with alpha = sqrt(mu a);
/// mu = 0 uses the vanishing-alpha recursion alpha_t^2 = (1 - alpha_t)
/// alpha_{t-1}^2 from alpha_0 = sqrt(a L). The three neighbor products of an
/// iteration travel in one exchange and count as one communication.
RunTrace run_dngd(const Problem& problem, const Reference& reference, const WeightMatrix& w,
                  double stepsize, int iterations, const RunOptions& options = {});

}  // namespace apm
