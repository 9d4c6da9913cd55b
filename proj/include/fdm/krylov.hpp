#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fdm/fdm1d.hpp"

namespace fdm {

using LinearMap = std::function<Vector(const Vector&)>;

struct SolverReport {
  std::string method;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // preconditioned residual norms, history[0] is the initial value
  std::uint64_t flops = 0;
  double seconds = 0.0;
};

struct SolveResult {
  Vector x;
  SolverReport report;
};

struct KrylovOptions {
  double rtol = 1e-8;
  int maxit = 200;
};

/// Preconditioned CG from a zero initial guess; stops when sqrt(r^T P^{-1} r) has dropped by rtol.
/// Throws NumericalFailure if p^T A p <= 0 or the preconditioner is indefinite.
SolveResult pcg(const LinearMap& a, const LinearMap& pinv, const Vector& b, const KrylovOptions& options = {});

/// Preconditioned MINRES for symmetric (possibly indefinite) A and SPD P.
SolveResult minres(const LinearMap& a, const LinearMap& pinv, const Vector& b, const KrylovOptions& options = {});

/// Fixed-step Chebyshev iteration for A x = b from x = 0 on the interval [lo, hi] of P^{-1} A.
/// The returned map is linear in b.
LinearMap chebyshev(LinearMap a, LinearMap pinv, double lo, double hi, int steps);

/// Extreme Ritz values of P^{-1} A from m steps of preconditioned Lanczos, scaled by 0.9 and 1.1.
std::pair<double, double> lanczos_bounds(const LinearMap& a, const LinearMap& pinv, int n, int m = 10,
                                         std::uint64_t seed = 0);

/// Unscaled extreme Ritz values.
std::pair<double, double> ritz_extremes(const LinearMap& a, const LinearMap& pinv, int n, int m = 10,
                                        std::uint64_t seed = 0);

}  // namespace fdm
