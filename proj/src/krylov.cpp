#include "fdm/krylov.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "fdm/errors.hpp"
#include "fdm/rng.hpp"

namespace fdm {

namespace {

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SolveResult pcg(const LinearMap& a, const LinearMap& pinv, const Vector& b, const KrylovOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult out;
  out.report.method = "cg";
  const int n = static_cast<int>(b.size());
  out.x = Vector::Zero(n);
  Vector r = b;
  Vector z = pinv(r);
  double rz = r.dot(z);
  if (rz < 0.0) throw NumericalFailure("pcg: preconditioner is not positive definite");
  const double norm0 = std::sqrt(rz);
  out.report.history.push_back(norm0);
  if (norm0 == 0.0) {
    out.report.converged = true;
    out.report.seconds = elapsed(t0);
    return out;
  }
  Vector p = z;
  for (int it = 1; it <= options.maxit; ++it) {
    const Vector ap = a(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) throw NumericalFailure("pcg: operator is not positive definite (p^T A p = " +
                                             std::to_string(pap) + " at iteration " + std::to_string(it) + ")");
    const double alpha = rz / pap;
    out.x += alpha * p;
    r -= alpha * ap;
    z = pinv(r);
    const double rz_new = r.dot(z);
    if (rz_new < 0.0) throw NumericalFailure("pcg: preconditioner is not positive definite");
    out.report.history.push_back(std::sqrt(rz_new));
    out.report.iterations = it;
    out.report.flops += 10ULL * static_cast<std::uint64_t>(n);
    if (std::sqrt(rz_new) <= options.rtol * norm0) {
      out.report.converged = true;
      break;
    }
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  out.report.seconds = elapsed(t0);
  return out;
}

SolveResult minres(const LinearMap& a, const LinearMap& pinv, const Vector& b, const KrylovOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult out;
  out.report.method = "minres";
  const int n = static_cast<int>(b.size());
  out.x = Vector::Zero(n);
  Vector r1 = b, r2 = b;
  Vector y = pinv(r1);
  const double by = b.dot(y);
  if (by < 0.0) throw NumericalFailure("minres: preconditioner is not positive definite");
  const double beta1 = std::sqrt(by);
  out.report.history.push_back(beta1);
  if (beta1 == 0.0) {
    out.report.converged = true;
    return out;
  }
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1, cs = -1.0, sn = 0.0;
  Vector w = Vector::Zero(n), w1(n), w2 = Vector::Zero(n);
  for (int it = 1; it <= options.maxit; ++it) {
    const Vector v = y / beta;
    y = a(v);
    if (it >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = pinv(r2);
    oldb = beta;
    const double ry = r2.dot(y);
    if (ry < 0.0) throw NumericalFailure("minres: preconditioner is not positive definite");
    beta = std::sqrt(ry);
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::min());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    out.x += phi * w;
    out.report.history.push_back(phibar);
    out.report.iterations = it;
    out.report.flops += 16ULL * static_cast<std::uint64_t>(n);
    if (phibar <= options.rtol * beta1) {
      out.report.converged = true;
      break;
    }
    if (beta == 0.0) break;
  }
  out.report.seconds = elapsed(t0);
  return out;
}

LinearMap chebyshev(LinearMap a, LinearMap pinv, double lo, double hi, int steps) {
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidArgument("chebyshev: interval must satisfy 0 < lo < hi");
  if (steps < 1) throw InvalidArgument("chebyshev: steps must be positive");
  return [a = std::move(a), pinv = std::move(pinv), lo, hi, steps](const Vector& b) {
    const double theta = 0.5 * (hi + lo), delta = 0.5 * (hi - lo);
    const double sigma = theta / delta;
    double rho = 1.0 / sigma;
    Vector d = pinv(b) / theta;
    Vector x = d;
    for (int s = 1; s < steps; ++s) {
      const Vector z = pinv(b - a(x));
      const double rho_new = 1.0 / (2.0 * sigma - rho);
      d = (rho_new * rho) * d + (2.0 * rho_new / delta) * z;
      x += d;
      rho = rho_new;
    }
    return x;
  };
}

std::pair<double, double> ritz_extremes(const LinearMap& a, const LinearMap& pinv, int n, int m,
                                        std::uint64_t seed) {
  if (n <= 0 || m <= 0) throw InvalidArgument("lanczos_bounds: empty problem");
  const CounterRng rng(seed, 0x1a2c);
  Vector r(n);
  for (int i = 0; i < n; ++i) r[i] = rng.uniform(static_cast<std::uint64_t>(i), -1.0, 1.0);
  // Lanczos coefficients recovered from preconditioned CG.
  std::vector<double> alphas, betas;
  Vector z = pinv(r);
  double rz = r.dot(z);
  Vector p = z;
  for (int j = 0; j < m && rz > 0.0; ++j) {
    const Vector ap = a(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    alphas.push_back(alpha);
    r -= alpha * ap;
    z = pinv(r);
    const double rz_new = r.dot(z);
    const double beta = rz_new / rz;
    betas.push_back(beta);
    if (!(rz_new > 1e-30 * rz)) break;
    p = z + beta * p;
    rz = rz_new;
  }
  const int s = static_cast<int>(alphas.size());
  if (s == 0) throw NumericalFailure("lanczos_bounds: breakdown before the first step");
  Matrix t = Matrix::Zero(s, s);
  for (int j = 0; j < s; ++j) {
    t(j, j) = 1.0 / alphas[j] + (j > 0 ? betas[j - 1] / alphas[j - 1] : 0.0);
    if (j + 1 < s) t(j, j + 1) = t(j + 1, j) = std::sqrt(betas[j]) / alphas[j];
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(t, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues()(0), eig.eigenvalues()(s - 1)};
}

std::pair<double, double> lanczos_bounds(const LinearMap& a, const LinearMap& pinv, int n, int m,
                                         std::uint64_t seed) {
  const auto [lo, hi] = ritz_extremes(a, pinv, n, m, seed);
  return {0.9 * lo, 1.1 * hi};
}

}  // namespace fdm
