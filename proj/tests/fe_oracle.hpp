#pragma once

// Brute-force pointwise finite element evaluation used as a reference for the
// sum-factorized kernels: every basis function is evaluated as a 3D proxy field
// at every quadrature point and integrated directly.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "fdm/dofmap.hpp"
#include "fdm/elements.hpp"
#include "fdm/fdm1d.hpp"
#include "fdm/mesh.hpp"

namespace oracle {

using fdm::Matrix;
using fdm::Vector;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Reference1D {
  std::vector<double> s, ds, r;
};

inline Reference1D eval1d(const fdm::FdmBasis1D& b, double x) {
  const double xs[1] = {x};
  const Matrix s = b.tabulate_cg(xs), ds = b.tabulate_cg_derivative(xs), r = b.tabulate_dg(xs);
  Reference1D out;
  for (int j = 0; j <= b.degree; ++j) out.s.push_back(s(0, j)), out.ds.push_back(ds(0, j));
  for (int j = 0; j < b.degree; ++j) out.r.push_back(r(0, j));
  return out;
}

struct FieldValue {
  Vec3 value = Vec3::Zero();  // scalar forms use component 0
  Vec3 deriv = Vec3::Zero();  // gradient, curl or divergence (component 0)
};

/// Reference proxy of local basis function q of the k-form element, and of its exterior derivative
/// as the classical grad / curl / div.
inline FieldValue reference_field(const fdm::ElementSpace& el, int q, const std::array<Reference1D, 3>& t) {
  const auto& d = el.dofs[q];
  const int idx[3] = {d.i, d.j, d.l};
  const int m = d.component;
  auto f = [&](int dir) {
    return el.families[m][dir] == fdm::Family::CG ? t[dir].s[idx[dir]] : t[dir].r[idx[dir]];
  };
  auto df = [&](int dir) { return t[dir].ds[idx[dir]]; };  // only valid on CG factors
  FieldValue out;
  const double prod = f(0) * f(1) * f(2);
  switch (el.k) {
    case 0:
      out.value[0] = prod;
      out.deriv = Vec3(df(0) * f(1) * f(2), f(0) * df(1) * f(2), f(0) * f(1) * df(2));
      break;
    case 1: {
      out.value[m] = prod;
      Vec3 grad = Vec3::Zero();
      for (int dir = 0; dir < 3; ++dir) {
        if (dir == m) continue;
        double g = df(dir);
        for (int o = 0; o < 3; ++o)
          if (o != dir) g *= f(o);
        grad[dir] = g;
      }
      out.deriv = grad.cross(Vec3::Unit(m));
      break;
    }
    case 2: {
      out.value[m] = prod;
      double g = df(m);
      for (int o = 0; o < 3; ++o)
        if (o != m) g *= f(o);
      out.deriv[0] = g;
      break;
    }
    default:
      out.value[0] = prod;
  }
  return out;
}

/// Trilinear Jacobian d x_r / d xi_d from the eight cell corners.
inline Mat3 trilinear_jacobian(const std::array<fdm::Point, 8>& corners, const Vec3& xi) {
  Mat3 j = Mat3::Zero();
  for (int a = 0; a < 8; ++a) {
    const double s[3] = {(a & 1) ? 1.0 : -1.0, (a & 2) ? 1.0 : -1.0, (a & 4) ? 1.0 : -1.0};
    for (int dir = 0; dir < 3; ++dir) {
      double dn = s[dir] / 2.0;
      for (int o = 0; o < 3; ++o)
        if (o != dir) dn *= (1.0 + s[o] * xi[o]) / 2.0;
      j.col(dir) += dn * corners[a];
    }
  }
  return j;
}

/// Physical proxy of a reference field under the k-form pullback.
inline FieldValue push_forward(int k, const FieldValue& ref, const Mat3& jac) {
  const double det = jac.determinant();
  const Mat3 jit = jac.inverse().transpose();
  FieldValue out;
  switch (k) {
    case 0:
      out.value = ref.value;
      out.deriv = jit * ref.deriv;
      break;
    case 1:
      out.value = jit * ref.value;
      out.deriv = jac * ref.deriv / det;
      break;
    case 2:
      out.value = jac * ref.value / det;
      out.deriv = ref.deriv / det;
      break;
    default:
      out.value = ref.value / det;
  }
  return out;
}

/// Dense cell matrix of (beta u, v) + (alpha du, dv) by tensor quadrature with n points per direction.
inline Matrix cell_matrix(const fdm::MeshComplex& mesh, int c, int k, const fdm::FdmBasis1D& basis, double alpha,
                          double beta, int n) {
  const fdm::ElementSpace el = fdm::build_element(k, basis.degree);
  const fdm::QuadratureRule rule = fdm::gauss_lobatto_rule(n);
  const auto corners = mesh.cell_corners(c);
  const int ndof = el.size();
  Matrix a = Matrix::Zero(ndof, ndof);
  std::vector<Reference1D> tab;
  for (double x : rule.points) tab.push_back(eval1d(basis, x));
  std::vector<FieldValue> phys(ndof);
  for (int qz = 0; qz < n; ++qz)
    for (int qy = 0; qy < n; ++qy)
      for (int qx = 0; qx < n; ++qx) {
        const Vec3 xi(rule.points[qx], rule.points[qy], rule.points[qz]);
        const Mat3 jac = trilinear_jacobian(corners, xi);
        const double w = rule.weights[qx] * rule.weights[qy] * rule.weights[qz] * jac.determinant();
        const std::array<Reference1D, 3> t{tab[qx], tab[qy], tab[qz]};
        for (int q = 0; q < ndof; ++q) phys[q] = push_forward(k, reference_field(el, q, t), jac);
        for (int i = 0; i < ndof; ++i)
          for (int j = 0; j < ndof; ++j)
            a(i, j) += w * (beta * phys[i].value.dot(phys[j].value) + alpha * phys[i].deriv.dot(phys[j].deriv));
      }
  return a;
}

/// Dense global matrix on free DOFs from per-cell oracle matrices.
inline Matrix global_matrix(const fdm::MeshComplex& mesh, const fdm::DofMap& dm, const fdm::FdmBasis1D& basis,
                            double alpha, double beta, int n) {
  Matrix a = Matrix::Zero(dm.num_free, dm.num_free);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Matrix ac = cell_matrix(mesh, c, dm.element.k, basis, alpha, beta, n);
    for (int i = 0; i < dm.local_size(); ++i) {
      const int fi = dm.cell_free(c, i);
      if (fi < 0) continue;
      for (int j = 0; j < dm.local_size(); ++j) {
        const int fj = dm.cell_free(c, j);
        if (fj >= 0) a(fi, fj) += ac(i, j);
      }
    }
  }
  return a;
}

/// Reference proxy of a global free-DOF vector on cell c at reference point xi.
inline FieldValue evaluate(const fdm::DofMap& dm, const fdm::FdmBasis1D& basis, const Vector& u, int c, const Vec3& xi) {
  const std::array<Reference1D, 3> t{eval1d(basis, xi[0]), eval1d(basis, xi[1]), eval1d(basis, xi[2])};
  FieldValue out;
  for (int q = 0; q < dm.local_size(); ++q) {
    const int f = dm.cell_free(c, q);
    if (f < 0) continue;
    const FieldValue b = reference_field(dm.element, q, t);
    out.value += u[f] * b.value;
    out.deriv += u[f] * b.deriv;
  }
  return out;
}

/// Free-DOF coefficients of the constant function 1 in V^0 (requires no Dirichlet boundary).
inline Vector constant_one(const fdm::MeshComplex& mesh, const fdm::DofMap& dm, const fdm::FdmBasis1D& basis) {
  const int p = basis.degree;
  // Interpolate 1 at the GLL nodes in one direction: S c = 1.
  const Vector c1 = basis.S.fullPivLu().solve(Vector::Ones(p + 1));
  Vector u = Vector::Zero(dm.num_free);
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int q = 0; q < dm.local_size(); ++q) {
      const auto& d = dm.element.dofs[q];
      const int f = dm.cell_free(c, q);
      if (f >= 0) u[f] = c1[d.i] * c1[d.j] * c1[d.l];
    }
  return u;
}

}  // namespace oracle
