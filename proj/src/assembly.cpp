#include "fdm/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "fdm/errors.hpp"
#include "fdm/rng.hpp"

namespace fdm {

double CoefficientField::at(int cell, const Point& x) const {
  switch (kind) {
    case Kind::constant: return value;
    case Kind::cellwise: return cell_values.at(cell);
    case Kind::analytic: return sampler(x);
  }
  return value;
}

CoefficientField CoefficientField::scaled(double s) const {
  CoefficientField f = *this;
  f.value *= s;
  for (double& v : f.cell_values) v *= s;
  if (kind == Kind::analytic) {
    auto g = sampler;
    f.sampler = [g, s](const Point& x) { return s * g(x); };
  }
  return f;
}

int operator_quadrature_size(int p) { return (3 * (p + 1) + 1) / 2; }

std::uint64_t contract3(const Matrix& cx, const Matrix& cy, const Matrix& cz, const double* in, double* out,
                        std::vector<double>& work) {
  const Eigen::Index nx = cx.cols(), ny = cy.cols(), nz = cz.cols();
  const Eigen::Index qx = cx.rows(), qy = cy.rows(), qz = cz.rows();
  work.resize(static_cast<std::size_t>(qx * ny * nz + qx * qy * nz));
  double* t1 = work.data();
  double* t2 = work.data() + qx * ny * nz;
  Eigen::Map<Matrix>(t1, qx, ny * nz).noalias() = cx * Eigen::Map<const Matrix>(in, nx, ny * nz);
  for (Eigen::Index l = 0; l < nz; ++l)
    Eigen::Map<Matrix>(t2 + l * qx * qy, qx, qy).noalias() =
        Eigen::Map<const Matrix>(t1 + l * qx * ny, qx, ny) * cy.transpose();
  Eigen::Map<Matrix>(out, qx * qy, qz).noalias() = Eigen::Map<const Matrix>(t2, qx * qy, nz) * cz.transpose();
  return 2ULL * static_cast<std::uint64_t>(qx * nx * ny * nz + qx * qy * ny * nz + qx * qy * qz * nz);
}

namespace {

// Packed symmetric 3x3: (00, 11, 22, 01, 02, 12).
constexpr int kSym[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};

void pullback_weight(int k, const Eigen::Matrix3d& jac, double scale, double* out) {
  const double det = jac.determinant();
  if (!(det > 0.0)) throw InvalidData("nonpositive Jacobian determinant at a quadrature point");
  if (k == 0 || k == 3) {
    out[0] = scale * (k == 0 ? det : 1.0 / det);
    return;
  }
  Eigen::Matrix3d w;
  if (k == 1) {
    const Eigen::Matrix3d inv = jac.inverse();
    w = det * inv * inv.transpose();
  } else {
    w = jac.transpose() * jac / det;
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) out[kSym[a][b]] = scale * w(a, b);
}

int weight_stride(int k) { return (k == 0 || k == 3) ? 1 : 6; }

}  // namespace

RieszOperator::RieszOperator(const MeshComplex& mesh, const DofMap& dofmap, const FdmBasis1D& basis,
                             CoefficientField alpha, CoefficientField beta, int quadrature_points)
    : mesh_(&mesh), dofmap_(&dofmap), basis_(&basis), alpha_(std::move(alpha)), beta_(std::move(beta)),
      k_(dofmap.element.k), p_(dofmap.element.p) {
  if (basis.degree != p_) throw InvalidArgument("RieszOperator: basis degree does not match the DOF map");
  if (mesh.num_cells() != dofmap.num_cells) throw InvalidArgument("RieszOperator: mesh does not match the DOF map");
  nq_ = quadrature_points > 0 ? quadrature_points : operator_quadrature_size(p_);
  rule_ = gauss_lobatto_rule(std::max(nq_, 2));
  nq_ = rule_.size();
  const ElementTables t = tabulate_element(basis, rule_);
  cg_ = t.cg;
  dg_ = t.dg;
  cg_t_ = cg_.transpose();
  dg_t_ = dg_.transpose();
  broken_sq_t_ = t.broken.cwiseAbs2().transpose();
  dg_sq_t_ = t.dg.cwiseAbs2().transpose();
  element_k_ = dofmap.element;
  if (k_ < 3) {
    element_k1_ = build_element(k_ + 1, p_);
    dhat_ = reference_diff(k_, p_, basis);
    dhat_t_ = dhat_.transpose();
  }

  const int npts = nq_ * nq_ * nq_;
  const int ncell = mesh.num_cells();
  mass_stride_ = weight_stride(k_);
  stiff_stride_ = k_ < 3 ? weight_stride(k_ + 1) : 1;
  mass_w_.assign(static_cast<std::size_t>(ncell) * npts * mass_stride_, 0.0);
  if (k_ < 3) stiff_w_.assign(static_cast<std::size_t>(ncell) * npts * stiff_stride_, 0.0);
  for (int c = 0; c < ncell; ++c) {
    for (int qz = 0; qz < nq_; ++qz)
      for (int qy = 0; qy < nq_; ++qy)
        for (int qx = 0; qx < nq_; ++qx) {
          const int q = qx + nq_ * (qy + nq_ * qz);
          const Point xi(rule_.points[qx], rule_.points[qy], rule_.points[qz]);
          const double w = rule_.weights[qx] * rule_.weights[qy] * rule_.weights[qz];
          const Eigen::Matrix3d jac = mesh.jacobian(c, xi);
          const Point x = (beta_.kind == CoefficientField::Kind::analytic || alpha_.kind == CoefficientField::Kind::analytic)
                              ? mesh.map(c, xi)
                              : Point::Zero();
          pullback_weight(k_, jac, w * beta_.at(c, x),
                          &mass_w_[(static_cast<std::size_t>(c) * npts + q) * mass_stride_]);
          if (k_ < 3)
            pullback_weight(k_ + 1, jac, w * alpha_.at(c, x),
                            &stiff_w_[(static_cast<std::size_t>(c) * npts + q) * stiff_stride_]);
        }
  }
}

const Matrix& RieszOperator::table(Family f, bool transposed) const {
  if (f == Family::CG) return transposed ? cg_t_ : cg_;
  return transposed ? dg_t_ : dg_;
}

void RieszOperator::weighted_mass(const ElementSpace& el, const std::vector<double>& weights, int stride, int c,
                                  const double* u, double* v, std::vector<double>& work) const {
  const int npts = nq_ * nq_ * nq_;
  const int ncomp = el.num_components;
  std::vector<double> values(static_cast<std::size_t>(ncomp) * npts);
  std::vector<double> weighted(static_cast<std::size_t>(ncomp) * npts);
  std::uint64_t flops = 0;
  for (int m = 0; m < ncomp; ++m) {
    const auto& f = el.families[m];
    flops += contract3(table(f[0], false), table(f[1], false), table(f[2], false), u + el.offsets[m],
                       values.data() + static_cast<std::size_t>(m) * npts, work);
  }
  const double* w = weights.data() + static_cast<std::size_t>(c) * npts * stride;
  if (stride == 1) {
    for (int q = 0; q < npts; ++q) weighted[q] = w[q] * values[q];
    flops += npts;
  } else {
    for (int q = 0; q < npts; ++q) {
      const double* wq = w + 6 * q;
      const double a0 = values[q], a1 = values[npts + q], a2 = values[2 * npts + q];
      weighted[q] = wq[0] * a0 + wq[3] * a1 + wq[4] * a2;
      weighted[npts + q] = wq[3] * a0 + wq[1] * a1 + wq[5] * a2;
      weighted[2 * npts + q] = wq[4] * a0 + wq[5] * a1 + wq[2] * a2;
    }
    flops += 18ULL * npts;
  }
  for (int m = 0; m < ncomp; ++m) {
    const auto& f = el.families[m];
    flops += contract3(table(f[0], true), table(f[1], true), table(f[2], true),
                       weighted.data() + static_cast<std::size_t>(m) * npts, v + el.offsets[m], work);
  }
  flops_ += flops;
}

void RieszOperator::apply_cell(int c, const double* u, double* v) const {
  std::vector<double> work;
  weighted_mass(element_k_, mass_w_, mass_stride_, c, u, v, work);
  if (k_ == 3) return;
  const int n1 = element_k1_.size();
  const int n0 = element_k_.size();
  std::vector<double> du(n1), dv(n1), back(n0);
  dhat_.multiply(std::span<const double>(u, n0), du);
  weighted_mass(element_k1_, stiff_w_, stiff_stride_, c, du.data(), dv.data(), work);
  dhat_t_.multiply(dv, back);
  for (int i = 0; i < n0; ++i) v[i] += back[i];
  flops_ += 4ULL * static_cast<std::uint64_t>(dhat_.nnz()) + n0;
}

Matrix RieszOperator::cell_matrix(int c) const {
  const int n = element_k_.size();
  Matrix a(n, n);
  Vector e = Vector::Zero(n), col(n);
  const auto saved = flops_;
  for (int j = 0; j < n; ++j) {
    e.setZero();
    e(j) = 1.0;
    apply_cell(c, e.data(), col.data());
    a.col(j) = col;
  }
  flops_ = saved;
  return 0.5 * (a + a.transpose());
}

void RieszOperator::apply(std::span<const double> u, std::span<double> v) const {
  if (static_cast<int>(u.size()) != size() || static_cast<int>(v.size()) != size())
    throw InvalidArgument("RieszOperator::apply: vector size does not match the number of free DOFs");
  std::fill(v.begin(), v.end(), 0.0);
  const int n = element_k_.size();
  std::vector<double> ul(n), vl(n);
  for (int c = 0; c < dofmap_->num_cells; ++c) {
    for (int q = 0; q < n; ++q) {
      const int f = dofmap_->cell_free(c, q);
      ul[q] = f >= 0 ? u[f] : 0.0;
    }
    apply_cell(c, ul.data(), vl.data());
    for (int q = 0; q < n; ++q) {
      const int f = dofmap_->cell_free(c, q);
      if (f >= 0) v[f] += vl[q];
    }
  }
  flops_ += static_cast<std::uint64_t>(dofmap_->num_cells) * n;
}

Vector RieszOperator::apply(const Vector& u) const {
  Vector v(u.size());
  apply(std::span<const double>(u.data(), u.size()), std::span<double>(v.data(), v.size()));
  return v;
}

void RieszOperator::broken_mass_diagonals(int c, Vector& mass_k, Vector& mass_k1) const {
  const int npts = nq_ * nq_ * nq_;
  std::vector<double> work, field(npts);
  auto diag = [&](const ElementSpace& el, const std::vector<double>& weights, int stride, Vector& out) {
    out.resize(el.size());
    for (int m = 0; m < el.num_components; ++m) {
      const double* w = weights.data() + static_cast<std::size_t>(c) * npts * stride;
      for (int q = 0; q < npts; ++q) field[q] = stride == 1 ? w[q] : w[6 * q + kSym[m][m]];
      const auto& f = el.families[m];
      const Matrix& tx = f[0] == Family::CG ? broken_sq_t_ : dg_sq_t_;
      const Matrix& ty = f[1] == Family::CG ? broken_sq_t_ : dg_sq_t_;
      const Matrix& tz = f[2] == Family::CG ? broken_sq_t_ : dg_sq_t_;
      contract3(tx, ty, tz, field.data(), out.data() + el.offsets[m], work);
    }
  };
  diag(element_k_, mass_w_, mass_stride_, mass_k);
  if (k_ < 3)
    diag(element_k1_, stiff_w_, stiff_stride_, mass_k1);
  else
    mass_k1.resize(0);
}

// ---------------------------------------------------------------------------------------------

void CellAssembler::add_pattern(std::span<const int> row_map, std::span<const int> col_map, const CsrMatrix& local) {
  if (pending_.empty()) pending_.resize(rows_);
  for (int i = 0; i < local.rows; ++i) {
    const int gi = row_map[i];
    if (gi < 0) continue;
    for (int q = local.row_ptr[i]; q < local.row_ptr[i + 1]; ++q) {
      const int gj = col_map[local.col_idx[q]];
      if (gj >= 0) pending_[gi].push_back(gj);
    }
  }
}

void CellAssembler::finalize_pattern() {
  if (pending_.empty()) pending_.resize(rows_);
  result_ = CsrMatrix(rows_, cols_);
  std::size_t total = 0;
  for (auto& row : pending_) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    total += row.size();
  }
  result_.col_idx.reserve(total);
  for (int i = 0; i < rows_; ++i) {
    result_.col_idx.insert(result_.col_idx.end(), pending_[i].begin(), pending_[i].end());
    result_.row_ptr[i + 1] = static_cast<int>(result_.col_idx.size());
    std::vector<int>().swap(pending_[i]);
  }
  pending_.clear();
  result_.values.assign(total, 0.0);
}

void CellAssembler::add_values(std::span<const int> row_map, std::span<const int> col_map, const CsrMatrix& local,
                               Mode mode) {
  for (int i = 0; i < local.rows; ++i) {
    const int gi = row_map[i];
    if (gi < 0) continue;
    const auto b = result_.col_idx.begin() + result_.row_ptr[gi];
    const auto e = result_.col_idx.begin() + result_.row_ptr[gi + 1];
    for (int q = local.row_ptr[i]; q < local.row_ptr[i + 1]; ++q) {
      const int gj = col_map[local.col_idx[q]];
      if (gj < 0) continue;
      const auto it = std::lower_bound(b, e, gj);
      if (it == e || *it != gj) throw InvalidStructure("CellAssembler: entry outside the recorded pattern");
      double& slot = result_.values[it - result_.col_idx.begin()];
      if (mode == Mode::add)
        slot += local.values[q];
      else
        slot = local.values[q];
    }
  }
}

CsrMatrix CellAssembler::take() { return std::move(result_); }

namespace {

std::vector<int> cell_map(const DofMap& map, int c) {
  std::vector<int> m(map.local_size());
  for (int q = 0; q < map.local_size(); ++q) m[q] = map.cell_free(c, q);
  return m;
}

// Local Gram structure sum_c w_c x_c^T x_c over the rows x_c of a fixed sparse X.
// `pattern` is the local result pattern, `map` sends weights to its values.
struct GramMap {
  CsrMatrix pattern;
  CsrMatrix map;

  explicit GramMap(const CsrMatrix& x) {
    std::vector<Triplet> pairs;
    for (int c = 0; c < x.rows; ++c)
      for (int a = x.row_ptr[c]; a < x.row_ptr[c + 1]; ++a)
        for (int b = x.row_ptr[c]; b < x.row_ptr[c + 1]; ++b) pairs.push_back({x.col_idx[a], x.col_idx[b], 0.0});
    pattern = CsrMatrix::from_triplets(x.cols, x.cols, pairs);
    std::vector<Triplet> z;
    z.reserve(pairs.size());
    for (int c = 0; c < x.rows; ++c)
      for (int a = x.row_ptr[c]; a < x.row_ptr[c + 1]; ++a) {
        const int r = x.col_idx[a];
        const auto rb = pattern.col_idx.begin() + pattern.row_ptr[r];
        const auto re = pattern.col_idx.begin() + pattern.row_ptr[r + 1];
        for (int b = x.row_ptr[c]; b < x.row_ptr[c + 1]; ++b) {
          const int pos = static_cast<int>(std::lower_bound(rb, re, x.col_idx[b]) - pattern.col_idx.begin());
          z.push_back({pos, c, x.values[a] * x.values[b]});
        }
      }
    map = CsrMatrix::from_triplets(static_cast<int>(pattern.nnz()), x.rows, std::move(z));
    pattern.symmetric = true;
  }

  CsrMatrix evaluate(const Vector& weights) const {
    CsrMatrix out = pattern;
    map.multiply(std::span<const double>(weights.data(), weights.size()), out.values);
    return out;
  }
};

CsrMatrix stack(const CsrMatrix& top, const CsrMatrix& bottom) {
  if (top.cols != bottom.cols) throw InvalidArgument("stack: column mismatch");
  CsrMatrix s(top.rows + bottom.rows, top.cols);
  s.col_idx = top.col_idx;
  s.values = top.values;
  s.col_idx.insert(s.col_idx.end(), bottom.col_idx.begin(), bottom.col_idx.end());
  s.values.insert(s.values.end(), bottom.values.begin(), bottom.values.end());
  for (int i = 0; i < top.rows; ++i) s.row_ptr[i + 1] = top.row_ptr[i + 1];
  for (int i = 0; i < bottom.rows; ++i) s.row_ptr[top.rows + i + 1] = top.row_ptr[top.rows] + bottom.row_ptr[i + 1];
  return s;
}

CsrMatrix assemble_gram(const MeshComplex& mesh, const DofMap& map, const GramMap& gram,
                        const std::function<Vector(int)>& weights) {
  CellAssembler asmb(map.num_free, map.num_free);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto m = cell_map(map, c);
    asmb.add_pattern(m, m, gram.pattern);
  }
  asmb.finalize_pattern();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto m = cell_map(map, c);
    asmb.add_values(m, m, gram.evaluate(weights(c)), CellAssembler::Mode::add);
  }
  CsrMatrix a = asmb.take();
  a.symmetric = true;
  return a;
}

}  // namespace

CsrMatrix assemble_auxiliary(const RieszOperator& op) {
  const int k = op.k(), p = op.p();
  const FdmBasis1D& basis = op.basis();
  const CsrMatrix g = broken_transform(k, p, basis);
  CsrMatrix x = g;
  if (k < 3) x = stack(g, multiply(broken_transform(k + 1, p, basis), reference_diff(k, p, basis)));
  const GramMap gram(x);
  return assemble_gram(op.mesh(), op.dofmap(), gram, [&](int c) {
    Vector mk, mk1;
    op.broken_mass_diagonals(c, mk, mk1);
    Vector w(mk.size() + mk1.size());
    w << mk, mk1;
    return w;
  });
}

CsrMatrix assemble_potential_auxiliary(const RieszOperator& op, const DofMap& potential) {
  const int k = op.k(), p = op.p();
  if (k != 1 && k != 2) throw InvalidArgument("assemble_potential_auxiliary: k must be 1 or 2");
  if (potential.element.k != k - 1 || potential.element.p != p)
    throw InvalidArgument("assemble_potential_auxiliary: potential DOF map must be V^{k-1} of the same degree");
  const FdmBasis1D& basis = op.basis();
  // Both broken mass diagonals come from beta.
  const RieszOperator pot(op.mesh(), potential, basis, op.beta(), op.beta());
  const CsrMatrix dbar = multiply(broken_transform(k, p, basis), reference_diff(k - 1, p, basis));
  const GramMap stiff(dbar);
  CsrMatrix b = assemble_gram(op.mesh(), potential, stiff, [&](int c) {
    Vector mk1, mk;
    pot.broken_mass_diagonals(c, mk1, mk);
    return mk;
  });
  if (k == 2) {
    const GramMap mass(broken_transform(k - 1, p, basis));
    CsrMatrix m = assemble_gram(op.mesh(), potential, mass, [&](int c) {
      Vector mk1, mk;
      pot.broken_mass_diagonals(c, mk1, mk);
      return mk1;
    });
    const double bmax = b.diagonal_values().size() ? b.diagonal_values().maxCoeff() : 0.0;
    const double mmax = m.diagonal_values().size() ? m.diagonal_values().maxCoeff() : 1.0;
    const double shift = mmax > 0.0 ? 1e-8 * bmax / mmax : 0.0;
    b = add(b, m, 1.0, shift);
    b.symmetric = true;
  }
  return b;
}

CsrMatrix assemble_p1(const MeshComplex& mesh, const DofMap& dofmap_p1, const CoefficientField& alpha,
                      const CoefficientField& beta) {
  if (dofmap_p1.element.p != 1) throw InvalidArgument("assemble_p1: DOF map must have p = 1");
  const FdmBasis1D basis = build_fdm_basis(1);
  const RieszOperator op(mesh, dofmap_p1, basis, alpha, beta, 3);
  const int n = dofmap_p1.local_size();
  CsrMatrix full = CsrMatrix::from_dense(Matrix::Ones(n, n));
  CellAssembler asmb(dofmap_p1.num_free, dofmap_p1.num_free);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto m = cell_map(dofmap_p1, c);
    asmb.add_pattern(m, m, full);
  }
  asmb.finalize_pattern();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto m = cell_map(dofmap_p1, c);
    CsrMatrix local = full;
    const Matrix a = op.cell_matrix(c);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) local.values[i * n + j] = a(i, j);
    asmb.add_values(m, m, local, CellAssembler::Mode::add);
  }
  CsrMatrix a = asmb.take();
  a.symmetric = true;
  return a;
}

namespace {

CsrMatrix assemble_assigned(const MeshComplex& mesh, const DofMap& rows, const DofMap& cols, const CsrMatrix& local) {
  CellAssembler asmb(rows.num_free, cols.num_free);
  for (int c = 0; c < mesh.num_cells(); ++c) asmb.add_pattern(cell_map(rows, c), cell_map(cols, c), local);
  asmb.finalize_pattern();
  for (int c = 0; c < mesh.num_cells(); ++c)
    asmb.add_values(cell_map(rows, c), cell_map(cols, c), local, CellAssembler::Mode::assign);
  return asmb.take();
}

}  // namespace

CsrMatrix assemble_transfer(const MeshComplex& mesh, const DofMap& source, const DofMap& target,
                            const FdmBasis1D& basis) {
  const int k = target.element.k;
  if (k < 1 || k > 3 || source.element.k != k - 1)
    throw InvalidArgument("assemble_transfer: need source V^{k-1} and target V^k with k in 1..3");
  if (source.element.p != basis.degree || target.element.p != basis.degree)
    throw InvalidArgument("assemble_transfer: degree mismatch");
  return assemble_assigned(mesh, target, source, reference_diff(k - 1, basis.degree, basis));
}

CsrMatrix assemble_coarse_embedding(const MeshComplex& mesh, const DofMap& coarse, const DofMap& fine,
                                    const FdmBasis1D& basis) {
  const int k = fine.element.k, p = fine.element.p;
  if (coarse.element.k != k || coarse.element.p != 1 || basis.degree != p)
    throw InvalidArgument("assemble_coarse_embedding: incompatible DOF maps");
  // Hats in FDM coefficients: S c = nodal values.
  Matrix hats(p + 1, 2);
  for (int i = 0; i <= p; ++i) {
    hats(i, 0) = 0.5 * (1.0 - basis.gll_nodes[i]);
    hats(i, 1) = 0.5 * (1.0 + basis.gll_nodes[i]);
  }
  const Matrix t_cg = basis.S.fullPivLu().solve(hats);
  Matrix t_dg = Matrix::Zero(p, 1);
  t_dg(0, 0) = 1.0;
  const ElementSpace& ef = fine.element;
  std::vector<CsrMatrix> blocks;
  for (int m = 0; m < ef.num_components; ++m) {
    Matrix f[3];
    for (int d = 0; d < 3; ++d) f[d] = ef.families[m][d] == Family::CG ? t_cg : t_dg;
    CsrMatrix b = kron3(f[0], f[1], f[2]).pruned(1e-15);
    blocks.push_back(b);
  }
  return assemble_assigned(mesh, fine, coarse, block_diagonal(blocks));
}

Vector random_coefficients(int n, std::uint64_t seed) {
  const CounterRng rng(seed, 0x5eed);
  Vector w(n);
  for (int i = 0; i < n; ++i) w(i) = rng.uniform(static_cast<std::uint64_t>(i), -1.0, 1.0);
  return w;
}

Vector assemble_rhs(const MeshComplex& mesh, const DofMap& dofmap, const FdmBasis1D& basis, std::uint64_t seed,
                    Vector* w_out) {
  const Vector w = random_coefficients(dofmap.num_free, seed);
  const RieszOperator op(mesh, dofmap, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
  if (w_out) *w_out = w;
  return op.apply(w);
}

}  // namespace fdm
