#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fdm/dofmap.hpp"
#include "fdm/elements.hpp"
#include "fdm/fdm1d.hpp"
#include "fdm/mesh.hpp"
#include "fdm/sparse.hpp"

namespace fdm {

struct CoefficientField {
  enum class Kind { constant, cellwise, analytic };
  Kind kind = Kind::constant;
  double value = 1.0;
  std::vector<double> cell_values;
  std::function<double(const Point&)> sampler;

  static CoefficientField constant(double v) { return {Kind::constant, v, {}, {}}; }
  static CoefficientField cellwise(std::vector<double> v) { return {Kind::cellwise, 0.0, std::move(v), {}}; }
  static CoefficientField analytic(std::function<double(const Point&)> f) { return {Kind::analytic, 0.0, {}, std::move(f)}; }

  double at(int cell, const Point& x) const;
  CoefficientField scaled(double s) const;
};

/// Quadrature points per direction used for the true operator.
int operator_quadrature_size(int p);

/// Sum-factorized cell contraction: out = (cz (x) cy (x) cx) in, with in indexed i + nx (j + ny l).
/// Returns the number of flops (2 per multiply-add).
std::uint64_t contract3(const Matrix& cx, const Matrix& cy, const Matrix& cz, const double* in, double* out,
                        std::vector<double>& work);

/// Matrix-free weighted Riesz operator a^k(u, v) = (beta u, v) + (alpha d u, d v) on free DOFs.
class RieszOperator {
public:
  RieszOperator(const MeshComplex& mesh, const DofMap& dofmap, const FdmBasis1D& basis, CoefficientField alpha,
                CoefficientField beta, int quadrature_points = 0);

  int size() const { return dofmap_->num_free; }
  int k() const { return k_; }
  int p() const { return p_; }
  const DofMap& dofmap() const { return *dofmap_; }
  const MeshComplex& mesh() const { return *mesh_; }
  const FdmBasis1D& basis() const { return *basis_; }
  const CoefficientField& alpha() const { return alpha_; }
  const CoefficientField& beta() const { return beta_; }
  int quadrature_points() const { return nq_; }

  void apply(std::span<const double> u, std::span<double> v) const;
  Vector apply(const Vector& u) const;

  /// Local cell action on reference coefficients (length element().size()).
  void apply_cell(int c, const double* u, double* v) const;
  /// Dense cell matrix built column by column from apply_cell.
  Matrix cell_matrix(int c) const;

  /// Diagonals of the broken-basis weighted mass matrices on cell c:
  /// mass for V^k weighted by beta, and for V^{k+1} weighted by alpha.
  void broken_mass_diagonals(int c, Vector& mass_k, Vector& mass_k1) const;

  std::uint64_t flops() const { return flops_; }
  void reset_flops() const { flops_ = 0; }

private:
  void weighted_mass(const ElementSpace& el, const std::vector<double>& weights, int stride, int c, const double* u,
                     double* v, std::vector<double>& work) const;
  const Matrix& table(Family f, bool transposed) const;

  const MeshComplex* mesh_;
  const DofMap* dofmap_;
  const FdmBasis1D* basis_;
  CoefficientField alpha_, beta_;
  int k_, p_, nq_;
  QuadratureRule rule_;
  Matrix cg_, dg_, cg_t_, dg_t_, broken_sq_t_, dg_sq_t_;
  ElementSpace element_k_, element_k1_;
  CsrMatrix dhat_, dhat_t_;
  // Per cell, per point: weighted pullback factors (1 or 6 entries per point).
  std::vector<double> mass_w_, stiff_w_;
  int mass_stride_ = 1, stiff_stride_ = 1;
  mutable std::uint64_t flops_ = 0;
};

/// Sparse auxiliary operator P^k on free DOFs.
CsrMatrix assemble_auxiliary(const RieszOperator& op);

/// Auxiliary operator of the potential problem on V^{k-1}: Dbar^T diag(Mbar^k_beta) Dbar, with the
/// k=2 mass shift described in the README.
CsrMatrix assemble_potential_auxiliary(const RieszOperator& op, const DofMap& potential_dofmap);

/// Exact p=1 operator on the given p=1 DOF map.
CsrMatrix assemble_p1(const MeshComplex& mesh, const DofMap& dofmap_p1, const CoefficientField& alpha,
                      const CoefficientField& beta);

/// Global exterior derivative V^{k-1} -> V^k on free DOFs (k in 1..3).
CsrMatrix assemble_transfer(const MeshComplex& mesh, const DofMap& source, const DofMap& target,
                            const FdmBasis1D& basis);

/// Embedding of the p=1 space into the degree-p space (free DOFs only).
CsrMatrix assemble_coarse_embedding(const MeshComplex& mesh, const DofMap& coarse, const DofMap& fine,
                                    const FdmBasis1D& basis);

/// Random Riesz representative w, uniform in [-1, 1].
Vector random_coefficients(int n, std::uint64_t seed);
/// F = A_{alpha=beta=1} w.
Vector assemble_rhs(const MeshComplex& mesh, const DofMap& dofmap, const FdmBasis1D& basis, std::uint64_t seed,
                    Vector* w_out = nullptr);

/// Generic finite element assembly of cell-local sparse matrices into a global free-DOF CSR matrix.
class CellAssembler {
public:
  enum class Mode { add, assign };
  CellAssembler(int rows, int cols) : rows_(rows), cols_(cols) {}
  /// Records the pattern of a local block (row_map/col_map entries -1 are skipped).
  void add_pattern(std::span<const int> row_map, std::span<const int> col_map, const CsrMatrix& local);
  void finalize_pattern();
  void add_values(std::span<const int> row_map, std::span<const int> col_map, const CsrMatrix& local, Mode mode);
  CsrMatrix take();

private:
  int rows_, cols_;
  std::vector<std::vector<int>> pending_;
  CsrMatrix result_;
};

}  // namespace fdm
