#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fdm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// n-point Gauss-Lobatto-Legendre rule on [-1, 1], exact for degree 2n-3.
QuadratureRule gauss_lobatto_rule(int n);

/// n-point Gauss-Legendre rule on [-1, 1], exact for degree 2n-1.
QuadratureRule gauss_legendre_rule(int n);

struct LagrangeTable {
  Matrix values;       // values(q, j) = l_j(x_q)
  Matrix derivatives;  // derivatives(q, j) = l_j'(x_q)
};

LagrangeTable lagrange_tabulate(std::span<const double> nodes, std::span<const double> eval_points);

struct GllMatrices {
  Matrix stiffness;  // (l_i', l_j')
  Matrix mass;       // (l_i, l_j)
};

/// Stiffness and mass of the degree-p GLL Lagrange basis, integrated exactly.
GllMatrices reference_matrices_gll(int p);

struct GeneralizedEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns are B-orthonormal
  int sweeps = 0;
};

/// Solves A v = lambda B v for symmetric A and SPD B by Cholesky reduction of B
/// followed by cyclic Jacobi rotations on the reduced standard problem.
/// Each eigenvector is signed so that its largest-magnitude entry is positive
/// (ties broken towards the lowest index).
GeneralizedEigen symmetric_generalized_eigen(const Matrix& a, const Matrix& b, double tol = 1e-14,
                                             int max_sweeps = 100);

/// One-dimensional FDM basis for P_p and DP_{p-1} on [-1, 1].
///
/// DOFs 0 and p are the endpoint (interface) DOFs, 1..p-1 the interior ones.
/// Interior functions are simultaneously L2- and H1-seminorm orthogonal;
/// the DP basis is r_0 = 2^{-1/2}, r_j = lambda_j^{-1/2} s_j'.
struct FdmBasis1D {
  int degree = 0;
  std::vector<double> gll_nodes;
  Matrix S;                         // S(i, j) = s_j(xi_i), (p+1) x (p+1)
  std::vector<double> eigenvalues;  // lambda_0 = 2, then ascending interior eigenvalues
  Matrix D;                         // D(i, j) = (r_i, s_j'), p x (p+1)
  Matrix G1d;                       // FDM → broken coefficients, (p+1) x (p+1)
  Matrix G1d_inverse;
  std::vector<double> dp_nodes;     // p Gauss-Legendre points carrying DP_{p-1}
  Matrix dp_values;                 // dp_values(g, j) = r_j(dp_nodes[g])

  int cg_size() const { return degree + 1; }
  int dg_size() const { return degree; }

  Matrix tabulate_cg(std::span<const double> x) const;
  Matrix tabulate_cg_derivative(std::span<const double> x) const;
  Matrix tabulate_dg(std::span<const double> x) const;
  /// L2-orthonormal broken basis of P_p: columns of tabulate_cg * G1d^{-1}.
  Matrix tabulate_broken(std::span<const double> x) const;
  /// Mass matrix (s_i, s_j) on the reference interval.
  Matrix mass() const;
};

FdmBasis1D build_fdm_basis(int p);

/// Symmetric (Loewdin) orthogonalization of the two endpoint functions.
/// Returns the broken transform G1d: identity on interior DOFs, the square root
/// of the interface Gram matrix on {0, p}.
Matrix broken_orthogonalize(const FdmBasis1D& basis);

}  // namespace fdm
