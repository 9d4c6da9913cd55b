#include "fdm/fdm1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fdm/errors.hpp"

namespace fdm {

namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& pn, double& dpn) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    pn = 1.0;
    dpn = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  pn = p1;
  // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1); only used away from +-1.
  dpn = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre_rule: n must be >= 1");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pn = 0.0, dpn = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, pn, dpn);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, pn, dpn);
    rule.points[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
  }
  // Symmetrize to remove rounding asymmetry.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.points[n - 1 - i] - rule.points[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_lobatto_rule(int n) {
  if (n < 2) throw InvalidArgument("gauss_lobatto_rule: n must be >= 2");
  const int N = n - 1;
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exactness_degree = 2 * n - 3;
  rule.points[0] = -1.0;
  rule.points[N] = 1.0;
  // Interior nodes are the roots of P_N'. Newton with q = P_N', q' = P_N''.
  for (int i = 1; i < N; ++i) {
    double x = -std::cos(std::numbers::pi * i / N);
    for (int it = 0; it < 100; ++it) {
      double pn = 0.0, dpn = 0.0;
      legendre(N, x, pn, dpn);
      const double d2pn = (2.0 * x * dpn - N * (N + 1.0) * pn) / (1.0 - x * x);
      const double dx = dpn / d2pn;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.points[i] = x;
  }
  for (int i = 0; i < n; ++i) {
    double pn = 0.0, dpn = 0.0;
    const double x = rule.points[i];
    if (i == 0 || i == N) {
      pn = (i == 0 && N % 2 == 1) ? -1.0 : 1.0;
    } else {
      legendre(N, x, pn, dpn);
    }
    rule.weights[i] = 2.0 / (N * (N + 1.0) * pn * pn);
  }
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.points[n - 1 - i] - rule.points[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

LagrangeTable lagrange_tabulate(std::span<const double> nodes, std::span<const double> eval_points) {
  const int n = static_cast<int>(nodes.size());
  const int q = static_cast<int>(eval_points.size());
  std::vector<double> w(n, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const double diff = nodes[j] - nodes[k];
      if (diff == 0.0) throw InvalidArgument("lagrange_tabulate: duplicate nodes");
      w[j] /= diff;
    }
  }
  LagrangeTable table{Matrix::Zero(q, n), Matrix::Zero(q, n)};
  for (int iq = 0; iq < q; ++iq) {
    const double x = eval_points[iq];
    for (int j = 0; j < n; ++j) {
      double value = w[j];
      for (int k = 0; k < n; ++k)
        if (k != j) value *= (x - nodes[k]);
      // l_j'(x) = w_j sum_m prod_{k != j, m} (x - x_k); robust at the nodes.
      double deriv = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m == j) continue;
        double term = w[j];
        for (int k = 0; k < n; ++k)
          if (k != j && k != m) term *= (x - nodes[k]);
        deriv += term;
      }
      table.values(iq, j) = value;
      table.derivatives(iq, j) = deriv;
    }
  }
  return table;
}

GllMatrices reference_matrices_gll(int p) {
  if (p < 1) throw InvalidArgument("reference_matrices_gll: p must be >= 1");
  const auto nodes = gauss_lobatto_rule(p + 1).points;
  const auto rule = gauss_legendre_rule(p + 1);
  const auto tab = lagrange_tabulate(nodes, rule.points);
  const Eigen::Map<const Vector> w(rule.weights.data(), rule.size());
  GllMatrices m;
  m.stiffness = tab.derivatives.transpose() * w.asDiagonal() * tab.derivatives;
  m.mass = tab.values.transpose() * w.asDiagonal() * tab.values;
  m.stiffness = 0.5 * (m.stiffness + m.stiffness.transpose()).eval();
  m.mass = 0.5 * (m.mass + m.mass.transpose()).eval();
  return m;
}

GeneralizedEigen symmetric_generalized_eigen(const Matrix& a, const Matrix& b, double tol, int max_sweeps) {
  const int n = static_cast<int>(a.rows());
  GeneralizedEigen out;
  if (n == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success) throw NumericalFailure("generalized eigensolve: B is not positive definite");
  const Matrix lower = llt.matrixL();
  // C = L^{-1} A L^{-T}
  Matrix c = lower.triangularView<Eigen::Lower>().solve(a);
  c = lower.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose()).eval();

  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(c.norm(), 1e-300);
  int sweep = 0;
  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += c(i, j) * c(i, j);
    return std::sqrt(s);
  };
  while (off_norm() > tol * scale) {
    if (sweep >= max_sweeps) {
      std::ostringstream msg;
      msg << "generalized eigensolve: Jacobi did not converge after " << sweep
          << " sweeps (off-diagonal norm " << off_norm() << ", size " << n << ")";
      throw NumericalFailure(msg.str());
    }
    for (int pp = 0; pp < n - 1; ++pp) {
      for (int qq = pp + 1; qq < n; ++qq) {
        const double apq = c(pp, qq);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (c(qq, qq) - c(pp, pp)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (int k = 0; k < n; ++k) {
          const double ckp = c(k, pp);
          const double ckq = c(k, qq);
          c(k, pp) = cs * ckp - sn * ckq;
          c(k, qq) = sn * ckp + cs * ckq;
        }
        for (int k = 0; k < n; ++k) {
          const double cpk = c(pp, k);
          const double cqk = c(qq, k);
          c(pp, k) = cs * cpk - sn * cqk;
          c(qq, k) = sn * cpk + cs * cqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, pp);
          const double vkq = v(k, qq);
          v(k, pp) = cs * vkp - sn * vkq;
          v(k, qq) = sn * vkp + cs * vkq;
        }
      }
    }
    ++sweep;
  }
  // Back-transform: eigenvectors of the pencil are L^{-T} v.
  Matrix vec = lower.transpose().triangularView<Eigen::Upper>().solve(v);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return c(x, x) < c(y, y); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    out.values(j) = c(order[j], order[j]);
    Vector col = vec.col(order[j]);
    const double mx = col.cwiseAbs().maxCoeff();
    int lead = 0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(col(i)) >= mx * (1.0 - 1e-10)) {
        lead = i;
        break;
      }
    }
    if (col(lead) < 0.0) col = -col;
    out.vectors.col(j) = col;
  }
  out.sweeps = sweep;
  return out;
}

Matrix FdmBasis1D::tabulate_cg(std::span<const double> x) const {
  return lagrange_tabulate(gll_nodes, x).values * S;
}

Matrix FdmBasis1D::tabulate_cg_derivative(std::span<const double> x) const {
  return lagrange_tabulate(gll_nodes, x).derivatives * S;
}

Matrix FdmBasis1D::tabulate_dg(std::span<const double> x) const {
  const int p = degree;
  const Matrix ds = tabulate_cg_derivative(x);
  Matrix r(static_cast<Eigen::Index>(x.size()), p);
  r.col(0).setConstant(1.0 / std::sqrt(eigenvalues[0]));
  for (int j = 1; j < p; ++j) r.col(j) = ds.col(j) / std::sqrt(eigenvalues[j]);
  return r;
}

Matrix FdmBasis1D::tabulate_broken(std::span<const double> x) const {
  return tabulate_cg(x) * G1d_inverse;
}

Matrix FdmBasis1D::mass() const {
  const auto gll = reference_matrices_gll(degree);
  Matrix b = S.transpose() * gll.mass * S;
  return 0.5 * (b + b.transpose());
}

Matrix broken_orthogonalize(const FdmBasis1D& basis) {
  const int p = basis.degree;
  const Matrix b = basis.mass();
  const double g00 = b(0, 0), g0p = 0.5 * (b(0, p) + b(p, 0)), gpp = b(p, p);
  const double det = g00 * gpp - g0p * g0p;
  if (!(g00 > 0.0 && gpp > 0.0 && det > 0.0))
    throw NumericalFailure("broken_orthogonalize: interface Gram matrix is not positive definite");
  // Symmetric square root of a 2x2 SPD matrix: (G + sqrt(det) I) / sqrt(tr + 2 sqrt(det)).
  const double sd = std::sqrt(det);
  const double t = std::sqrt(g00 + gpp + 2.0 * sd);
  Matrix g = Matrix::Identity(p + 1, p + 1);
  g(0, 0) = (g00 + sd) / t;
  g(p, p) = (gpp + sd) / t;
  g(0, p) = g(p, 0) = g0p / t;
  return g;
}

FdmBasis1D build_fdm_basis(int p) {
  if (p < 1) throw InvalidArgument("build_fdm_basis: p must be >= 1");
  FdmBasis1D basis;
  basis.degree = p;
  basis.gll_nodes = gauss_lobatto_rule(p + 1).points;
  const auto gll = reference_matrices_gll(p);
  const int ni = p - 1;

  basis.S = Matrix::Zero(p + 1, p + 1);
  basis.S(0, 0) = 1.0;
  basis.S(p, p) = 1.0;
  basis.eigenvalues.assign(p, 0.0);
  basis.eigenvalues[0] = 2.0;
  if (ni > 0) {
    const Matrix a_ii = gll.stiffness.block(1, 1, ni, ni);
    const Matrix b_ii = gll.mass.block(1, 1, ni, ni);
    const auto eig = symmetric_generalized_eigen(a_ii, b_ii);
    const Matrix& s_ii = eig.vectors;
    basis.S.block(1, 1, ni, ni) = s_ii;
    Matrix b_ig(ni, 2);
    b_ig.col(0) = gll.mass.block(1, 0, ni, 1);
    b_ig.col(1) = gll.mass.block(1, p, ni, 1);
    const Matrix s_ig = -s_ii * (s_ii.transpose() * b_ig);
    basis.S.block(1, 0, ni, 1) = s_ig.col(0);
    basis.S.block(1, p, ni, 1) = s_ig.col(1);
    for (int j = 0; j < ni; ++j) {
      if (!(eig.values(j) > 0.0)) throw NumericalFailure("build_fdm_basis: nonpositive interior eigenvalue");
      basis.eigenvalues[j + 1] = eig.values(j);
    }
  }

  // D(i, j) = (r_i, s_j') with a rule exact for degree 2p.
  const auto rule = gauss_legendre_rule(p + 1);
  const Matrix ds = basis.tabulate_cg_derivative(rule.points);
  const Matrix r = basis.tabulate_dg(rule.points);
  const Eigen::Map<const Vector> w(rule.weights.data(), rule.size());
  basis.D = r.transpose() * w.asDiagonal() * ds;
  // Interior columns are exactly sqrt(lambda_j) e_j; remove quadrature noise.
  for (int j = 1; j < p; ++j) {
    basis.D.col(j).setZero();
    basis.D(j, j) = std::sqrt(basis.eigenvalues[j]);
  }

  basis.dp_nodes = gauss_legendre_rule(p).points;
  basis.dp_values = basis.tabulate_dg(basis.dp_nodes);

  basis.G1d = broken_orthogonalize(basis);
  basis.G1d_inverse = basis.G1d.inverse();
  return basis;
}

}  // namespace fdm
