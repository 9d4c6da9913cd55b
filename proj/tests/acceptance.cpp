// Acceptance checks, one line per criterion.  Usage: acceptance [n]
// Without an argument all criteria run; the exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fdm/condense.hpp"
#include "fdm/decompositions.hpp"
#include "fdm/elements.hpp"
#include "fdm/experiments.hpp"
#include "fdm/ordering.hpp"
#include "oracles.hpp"

using namespace fdm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (failures_++ < 6) fail_ << (fail_.tellp() > 0 ? "; " : "") << what;
    }
  }
  void note(const std::string& s) { note_ << (note_.tellp() > 0 ? ", " : "") << s; }
  Outcome done() const {
    std::string d = note_.str();
    if (!pass_) d += (d.empty() ? "" : " | ") + std::string("failed: ") + fail_.str() +
                     (failures_ > 6 ? " (+" + std::to_string(failures_ - 6) + " more)" : "");
    return {pass_, d};
  }

private:
  bool pass_ = true;
  int failures_ = 0;
  std::ostringstream fail_, note_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const Decomposition kDecompositions[] = {Decomposition::pafw, Decomposition::ph, Decomposition::sc_pafw,
                                         Decomposition::sc_ph};

// Gauss-Legendre points and weights from the Jacobi matrix of the Legendre recurrence.
std::pair<Vector, Vector> gauss_points(int n) {
  Matrix j = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) j(i, i - 1) = j(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  return {es.eigenvalues(), 2.0 * es.eigenvectors().row(0).transpose().cwiseAbs2()};
}

double lagrange_value(const std::vector<double>& nodes, int j, double x) {
  double v = 1.0;
  for (std::size_t m = 0; m < nodes.size(); ++m)
    if (static_cast<int>(m) != j) v *= (x - nodes[m]) / (nodes[j] - nodes[m]);
  return v;
}

double lagrange_derivative(const std::vector<double>& nodes, int j, double x) {
  double d = 0.0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    if (static_cast<int>(m) == j) continue;
    double t = 1.0 / (nodes[j] - nodes[m]);
    for (std::size_t n = 0; n < nodes.size(); ++n)
      if (static_cast<int>(n) != j && n != m) t *= (x - nodes[n]) / (nodes[j] - nodes[n]);
    d += t;
  }
  return d;
}

// ---------------------------------------------------------------------------------------------

Outcome criterion_1() {
  Check c;
  double worst_b = 0.0, worst_a = 0.0;
  for (int p = 2; p <= 12; ++p) {
    const FdmBasis1D b = build_fdm_basis(p);
    // GLL Lagrange mass and stiffness by Gauss quadrature exact for degree 2p.
    const auto [gx, gw] = gauss_points(p + 1);
    Matrix lv(gx.size(), p + 1), ld(gx.size(), p + 1);
    for (Eigen::Index q = 0; q < gx.size(); ++q)
      for (int j = 0; j <= p; ++j) {
        lv(q, j) = lagrange_value(b.gll_nodes, j, gx[q]);
        ld(q, j) = lagrange_derivative(b.gll_nodes, j, gx[q]);
      }
    const Matrix mass = lv.transpose() * gw.asDiagonal() * lv;
    const Matrix stiff = ld.transpose() * gw.asDiagonal() * ld;
    Matrix bm = b.S.transpose() * mass * b.S;
    for (int i = 0; i <= p; ++i) bm(i, i) = 0.0;
    bm(0, p) = bm(p, 0) = 0.0;
    const Matrix sii = b.S.block(0, 1, p + 1, p - 1);
    Matrix ai = sii.transpose() * stiff * sii;
    for (int i = 1; i < p; ++i) ai(i - 1, i - 1) -= b.eigenvalues[i];
    worst_b = std::max(worst_b, oracle::max_abs(bm));
    worst_a = std::max(worst_a, oracle::max_abs(ai));
  }
  c.require(worst_b < 1e-9, "mass residual " + fmt(worst_b));
  c.require(worst_a < 1e-9, "stiffness residual " + fmt(worst_a));

  // p = 2: the single bubble is l_1; the endpoint function is l_0 made mass-orthogonal to it.
  const std::vector<double> nodes{-1.0, 0.0, 1.0};
  const oracle::Poly l0 = oracle::lagrange(nodes, 0), l1 = oracle::lagrange(nodes, 1), l2 = oracle::lagrange(nodes, 2);
  const double lambda1 = (l1.derivative() * l1.derivative()).integral() / (l1 * l1).integral();
  const oracle::Poly s0 = l0 + oracle::scale(l1, -(l0 * l1).integral() / (l1 * l1).integral());
  const oracle::Poly s2 = l2 + oracle::scale(l1, -(l2 * l1).integral() / (l1 * l1).integral());
  const FdmBasis1D b2 = build_fdm_basis(2);
  const Matrix m2 = b2.mass();
  c.require(std::abs(lambda1 - 2.5) < 1e-14 && std::abs(b2.eigenvalues[1] - lambda1) < 1e-12, "lambda_1");
  c.require(std::abs((s0 * s0).integral() - 0.25) < 1e-14 && std::abs(m2(0, 0) - 0.25) < 1e-12, "B00");
  c.require(std::abs((s0 * s2).integral() + 1.0 / 12) < 1e-14 && std::abs(m2(0, 2) + 1.0 / 12) < 1e-12, "B02");
  c.note("max residuals " + fmt(worst_b) + " / " + fmt(worst_a) + " over p=2..12");
  return c.done();
}

Outcome criterion_2() {
  Check c;
  double worst = 0.0, worst_col = 0.0;
  for (int p = 1; p <= 6; ++p) {
    const FdmBasis1D b = build_fdm_basis(p);
    for (int k = 0; k <= 1; ++k) worst = std::max(worst, multiply(reference_diff(k + 1, p, b), reference_diff(k, p, b)).max_abs());
    auto lam = [&](int i) { return std::sqrt(b.eigenvalues[i]); };
    const ElementSpace e0 = build_element(0, p), e1 = build_element(1, p), e2 = build_element(2, p),
                       e3 = build_element(3, p);
    const Matrix g = reference_diff(0, p, b).to_dense(), cu = reference_diff(1, p, b).to_dense(),
                 dv = reference_diff(2, p, b).to_dense();
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        for (int l = 0; l < p; ++l) {
          if (i > 0 && j > 0 && l > 0) {
            Vector e = Vector::Zero(e1.size());
            e[e1.index(0, i, j, l)] = lam(i);
            e[e1.index(1, i, j, l)] = lam(j);
            e[e1.index(2, i, j, l)] = lam(l);
            worst_col = std::max(worst_col, (g.col(e0.index(0, i, j, l)) - e).cwiseAbs().maxCoeff());
          }
          if (j > 0 && l > 0) {
            Vector e = Vector::Zero(e2.size());
            e[e2.index(2, i, j, l)] = lam(j);
            e[e2.index(1, i, j, l)] = -lam(l);
            worst_col = std::max(worst_col, (cu.col(e1.index(0, i, j, l)) - e).cwiseAbs().maxCoeff());
          }
          if (i > 0) {
            Vector e = Vector::Zero(e3.size());
            e[e3.index(0, i, j, l)] = lam(i);
            worst_col = std::max(worst_col, (dv.col(e2.index(0, i, j, l)) - e).cwiseAbs().maxCoeff());
          }
        }
  }
  c.require(worst < 1e-10, "d d = " + fmt(worst));
  c.require(worst_col < 1e-10, "interior columns " + fmt(worst_col));
  c.note("max |dd| " + fmt(worst) + ", interior column error " + fmt(worst_col));
  return c.done();
}

Outcome criterion_3() {
  Check c;
  const MeshComplex mesh = build_box_mesh(2, 2, 2);
  double worst = 0.0;
  for (int p = 1; p <= 5; ++p) {
    const FdmBasis1D basis = build_fdm_basis(p);
    for (int k = 0; k <= 2; ++k) {
      const DofMap dm = build_dofmap(mesh, k, p, Dirichlet::none);
      const RieszOperator op(mesh, dm, basis, CoefficientField::constant(3.0), CoefficientField::constant(0.25));
      const CsrMatrix aux = assemble_auxiliary(op);
      for (int t = 0; t < 20; ++t) {
        const Vector u = oracle::random_vector(op.size(), 100 + t);
        const Vector au = op.apply(u);
        worst = std::max(worst, (au - aux * u).norm() / au.norm());
      }
    }
  }
  c.require(worst < 1e-9, "relative operator difference " + fmt(worst));
  c.note("max ||(A-P)u||/||Au|| " + fmt(worst));
  return c.done();
}

Outcome criterion_4() {
  Check c;
  const MeshComplex mesh = build_box_mesh(2, 2, 2);
  int worst_row = 0;
  for (int p : {3, 4, 5}) {
    const FdmBasis1D basis = build_fdm_basis(p);
    for (int k = 0; k <= 3; ++k) {
      const DofMap dm = build_dofmap(mesh, k, p, Dirichlet::all);
      const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1e-3));
      const CsrMatrix aux = assemble_auxiliary(op);
      const int bound = (k == 0 || k == 3) ? 1 : 3;
      for (int i = 0; i < dm.num_free; ++i) {
        if (dm.owner_dim[i] != 3) continue;
        int nnz = 0;
        for (int t = aux.row_ptr[i]; t < aux.row_ptr[i + 1]; ++t)
          if (dm.owner_dim[aux.col_idx[t]] == 3 && aux.values[t] != 0.0) ++nnz;
        worst_row = std::max(worst_row, nnz - bound);
        c.require(nnz <= bound, "k=" + std::to_string(k) + " p=" + std::to_string(p) + " interior row nnz " +
                                    std::to_string(nnz));
      }
    }

    {
      const DofMap dm = build_dofmap(mesh, 2, p, Dirichlet::all);
      const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
      PreconditionerOptions o;
      o.decomposition = Decomposition::sc_ph;
      const TwoLevelPreconditioner pc(op, o);
      const CsrMatrix& s = pc.condensed()->schur();
      const PatchStage& st = pc.relaxation().primal();
      for (int i = 0; i < st.num_patches(); ++i) {
        const CsrMatrix sub = s.submatrix(st.patch_rows()[i]).pruned(1e-12 * s.max_abs());
        c.require(sub.nnz() == sub.rows, "face patch not diagonal at p=" + std::to_string(p));
      }
    }

    const DofMap dm = build_dofmap(mesh, 1, p, Dirichlet::all);
    const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
    for (Decomposition d : {Decomposition::ph, Decomposition::sc_ph}) {
      PreconditionerOptions o;
      o.decomposition = d;
      o.factorization = Factorization::chol;
      const TwoLevelPreconditioner pc(op, o);
      const CsrMatrix& level = pc.condensed() ? pc.condensed()->schur() : pc.auxiliary();
      const PatchStage& st = pc.relaxation().primal();
      for (int i = 0; i < st.num_patches(); ++i) {
        const CsrMatrix sub = level.submatrix(st.patch_rows()[i]).pruned(1e-12 * level.max_abs());
        int blocks = 0;
        const std::vector<int> label = connected_components(sub, &blocks);
        const CholFactor& f = st.factors()[i];
        bool separated = true, contiguous = true;
        std::set<int> closed;
        for (int t = 0; t < f.size(); ++t) {
          if (t > 0 && label[f.perm[t]] != label[f.perm[t - 1]]) closed.insert(label[f.perm[t - 1]]);
          contiguous = contiguous && closed.count(label[f.perm[t]]) == 0;
          for (int q = f.L.row_ptr[t]; q < f.L.row_ptr[t + 1]; ++q)
            separated = separated && label[f.perm[f.L.col_idx[q]]] == label[f.perm[t]];
        }
        c.require(blocks == p && separated && contiguous,
                  to_string(d) + " edge patch at p=" + std::to_string(p) + ": " + std::to_string(blocks) + " blocks");
      }
    }
  }
  c.note("interior rows within bound, face patches diagonal, edge factors split into p blocks for p=3,4,5");
  return c.done();
}

Outcome criterion_5() {
  Check c;
  const MeshComplex mesh = build_box_mesh(2, 2, 2, Distortion::jitter(0.1, 7));
  double worst = 0.0;
  for (int p = 1; p <= 5; ++p) {
    const FdmBasis1D basis = build_fdm_basis(p);
    for (int k = 0; k <= 3; ++k) {
      const DofMap dm = build_dofmap(mesh, k, p, Dirichlet::all);
      const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
      const CsrMatrix aux = assemble_auxiliary(op);
      const CondensedOperator cond(aux, dm.cell_interior_mask(), dm.interior_group);
      for (int t = 0; t < 5; ++t) {
        Vector x = Vector::Zero(aux.rows);
        const Vector v = oracle::random_vector(cond.interior_size(), 50 + t);
        for (int i = 0; i < cond.interior_size(); ++i) x[cond.interior_dofs()[i]] = v[i];
        worst = std::max(worst, oracle::max_abs(cond.restrict_interface(aux * x)));
      }
    }
  }
  c.require(worst < 1e-10, "max |R_G P R_I^T| " + fmt(worst));
  c.note("max |R_G P R_I^T x| " + fmt(worst) + " on jitter(0.1)");
  return c.done();
}

// Iteration counts for criteria 6 and 8, cached by (k, p, l, jitter, decomposition).
using CountKey = std::tuple<int, int, int, bool, Decomposition>;
std::map<CountKey, std::pair<int, bool>>& counts() {
  static std::map<CountKey, std::pair<int, bool>> m;
  return m;
}

std::pair<int, bool> iterations(int k, int p, int l, bool jitter, Decomposition d) {
  const CountKey key{k, p, l, jitter, d};
  auto it = counts().find(key);
  if (it != counts().end()) return it->second;
  RieszConfig rc;
  rc.k = k;
  rc.p = p;
  rc.mesh.refine = l;
  rc.mesh.distortion = jitter ? Distortion::jitter(0.1, 1) : Distortion::none();
  rc.alpha = "1";
  rc.beta = "1e-8";
  rc.krylov = {1e-8, 400};
  rc.preconditioner.decomposition = d;
  const RieszResult r = run_riesz(rc);
  return counts()[key] = {r.report.iterations, r.report.converged};
}

Outcome criterion_6() {
  Check c;
  int worst_p = 0, worst_h = 0, worst_mag = 0;
  for (int k = 0; k <= 2; ++k)
    for (Decomposition d : kDecompositions) {
      for (int l = 0; l <= 1; ++l) {
        int lo = 1 << 30, hi = 0;
        for (int p : {3, 5, 7}) {
          const auto [it, ok] = iterations(k, p, l, false, d);
          const std::string tag = "k=" + std::to_string(k) + " " + to_string(d) + " p=" + std::to_string(p) +
                                  " l=" + std::to_string(l);
          c.require(ok, tag + " did not converge");
          c.require(it <= 30, tag + " took " + std::to_string(it));
          lo = std::min(lo, it);
          hi = std::max(hi, it);
          worst_mag = std::max(worst_mag, it);
        }
        worst_p = std::max(worst_p, hi - lo);
        c.require(hi - lo <= 4, "p-spread " + std::to_string(hi - lo) + " for k=" + std::to_string(k) + " " +
                                    to_string(d) + " l=" + std::to_string(l));
      }
      for (int p : {3, 5, 7}) {
        const int dh = std::abs(iterations(k, p, 1, false, d).first - iterations(k, p, 0, false, d).first);
        worst_h = std::max(worst_h, dh);
        c.require(dh <= 3, "h-change " + std::to_string(dh) + " for k=" + std::to_string(k) + " " + to_string(d) +
                               " p=" + std::to_string(p));
      }
    }
  c.note("max p-spread " + std::to_string(worst_p) + ", max h-change " + std::to_string(worst_h) +
         ", max iterations " + std::to_string(worst_mag));
  return c.done();
}

Outcome criterion_7() {
  Check c;
  const std::vector<double> alphas{1e-3, 1.0, 1e3}, betas{1e-6, 1e-3, 1.0, 1e3, 1e6};
  double worst_ratio = 0.0;
  int pairs = 0;
  for (int k : {1, 2}) {
    RieszConfig base;
    base.k = k;
    base.p = 5;
    base.preconditioner.decomposition = Decomposition::sc_ph;
    const std::vector<SweepRow> rows = run_sweep(base, alphas, betas);
    int lo = 1 << 30, hi = 0;
    for (const auto& r : rows) {
      c.require(r.converged, "k=" + std::to_string(k) + " (" + fmt(r.alpha) + "," + fmt(r.beta) + ") did not converge");
      lo = std::min(lo, r.iterations);
      hi = std::max(hi, r.iterations);
    }
    const double ratio = static_cast<double>(hi) / std::max(lo, 1);
    worst_ratio = std::max(worst_ratio, ratio);
    c.require(ratio <= 2.5, "k=" + std::to_string(k) + " ratio " + fmt(ratio));
    for (const auto& r : rows)
      for (const auto& q : rows)
        if (std::abs(q.alpha - 1e3 * r.alpha) <= 1e-9 * q.alpha && std::abs(q.beta - 1e3 * r.beta) <= 1e-9 * q.beta) {
          ++pairs;
          c.require(q.iterations == r.iterations, "scale pair (" + fmt(r.alpha) + "," + fmt(r.beta) + ") gives " +
                                                      std::to_string(r.iterations) + " vs " +
                                                      std::to_string(q.iterations));
        }
    // (1, 1) against (1e3, 1e3) explicitly.
    const auto one = run_sweep(base, {1.0, 1e3}, {1.0, 1e3});
    c.require(one[0].iterations == one[3].iterations, "(1,1) vs (1e3,1e3) for k=" + std::to_string(k));
    c.note("k=" + std::to_string(k) + " iterations " + std::to_string(lo) + ".." + std::to_string(hi));
  }
  c.note("max ratio " + fmt(worst_ratio) + ", " + std::to_string(pairs) + " scale pairs");
  return c.done();
}

Outcome criterion_8() {
  Check c;
  double worst = 0.0;
  std::string where;
  for (int k = 0; k <= 2; ++k)
    for (Decomposition d : kDecompositions)
      for (int l = 0; l <= 1; ++l)
        for (int p : {3, 5, 7}) {
          const auto [cart, ok_c] = iterations(k, p, l, false, d);
          const auto [jit, ok_j] = iterations(k, p, l, true, d);
          const double ratio = static_cast<double>(jit) / std::max(cart, 1);
          const std::string tag =
              "k=" + std::to_string(k) + " " + to_string(d) + " p=" + std::to_string(p) + " l=" + std::to_string(l);
          c.require(ok_j, tag + " did not converge on jitter");
          c.require(ratio <= 2.5, tag + " ratio " + fmt(ratio) + " (" + std::to_string(jit) + "/" +
                                      std::to_string(cart) + ")");
          if (ratio > worst) {
            worst = ratio;
            where = tag;
          }
        }
  c.note("max jitter/Cartesian ratio " + fmt(worst) + " at " + where);
  return c.done();
}

Outcome criterion_9() {
  Check c;
  std::vector<double> ps, icc, gll, flops;
  for (int p : {4, 6, 8, 10}) {
    const ComplexityRow r = run_complexity(0, p, MeshSpec{});
    ps.push_back(p);
    icc.push_back(static_cast<double>(r.icc_nnz));
    gll.push_back(static_cast<double>(r.gll_nnz));
    flops.push_back(static_cast<double>(r.cycle_flops + r.operator_flops));
  }
  const double e_icc = fitted_exponent(ps, icc), e_gll = fitted_exponent(ps, gll), e_flops = fitted_exponent(ps, flops);
  c.require(e_icc <= 3.6, "ICC exponent " + fmt(e_icc));
  c.require(e_gll >= 5.0, "GLL exponent " + fmt(e_gll));
  c.require(e_flops <= 4.6, "flop exponent " + fmt(e_flops));
  c.note("exponents: icc_sc " + fmt(e_icc) + ", gll " + fmt(e_gll) + ", flops " + fmt(e_flops));
  return c.done();
}

Outcome criterion_10() {
  Check c;
  for (int k = 1; k <= 3; ++k) {
    std::vector<int> its;
    for (int p : {3, 5}) {
      HodgeConfig h;
      h.k = k;
      h.p = p;
      const HodgeResult r = run_hodge(h);
      c.require(r.report.converged, "k=" + std::to_string(k) + " p=" + std::to_string(p) + " did not converge");
      c.require(r.report.iterations <= 15, "k=" + std::to_string(k) + " p=" + std::to_string(p) + " took " +
                                               std::to_string(r.report.iterations));
      its.push_back(r.report.iterations);
    }
    c.require(std::abs(its[1] - its[0]) <= 3, "k=" + std::to_string(k) + " not flat");
    c.note("k=" + std::to_string(k) + ": " + std::to_string(its[0]) + "/" + std::to_string(its[1]));
  }
  return c.done();
}

Outcome criterion_11() {
  Check c;
  int runs = 0, worst = 0;
  for (int k = 0; k <= 2; ++k)
    for (Decomposition d : kDecompositions)
      for (Factorization f : {Factorization::automatic, Factorization::chol, Factorization::icc_sc})
        for (bool jitter : {false, true})
          for (Dirichlet dir : {Dirichlet::all, Dirichlet::none}) {
            RieszConfig rc;
            rc.dirichlet = dir;
            rc.k = k;
            rc.p = 1;
            rc.mesh.distortion = jitter ? Distortion::jitter(0.1, 3) : Distortion::none();
            rc.alpha = "1";
            rc.beta = k == 0 ? "1e-8" : "1";
            rc.preconditioner.decomposition = d;
            rc.preconditioner.factorization = f;
            const RieszResult r = run_riesz(rc);
            ++runs;
            worst = std::max(worst, r.report.iterations);
            c.require(r.report.converged && r.report.iterations == 1,
                      "k=" + std::to_string(k) + " " + to_string(d) + " " + to_string(f) +
                          (jitter ? " jitter" : " cartesian") +
                          (dir == Dirichlet::all ? " dirichlet" : " natural") + " took " + std::to_string(r.report.iterations));
          }
  c.note(std::to_string(runs) + " configurations, max iterations " + std::to_string(worst));
  return c.done();
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list = {
      {"FDM basis orthogonality", criterion_1},
      {"complex identities", criterion_2},
      {"auxiliary exactness", criterion_3},
      {"sparsity", criterion_4},
      {"Schur orthogonality", criterion_5},
      {"solver robustness", criterion_6},
      {"coefficient robustness", criterion_7},
      {"distorted-mesh degradation", criterion_8},
      {"complexity scaling", criterion_9},
      {"Hodge Laplacian", criterion_10},
      {"lowest-order exactness", criterion_11},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  const auto& list = criteria();
  std::vector<int> which;
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(list.size())) {
      std::fprintf(stderr, "usage: acceptance [1-%zu]\n", list.size());
      return 2;
    }
    which.push_back(n);
  } else {
    for (int n = 1; n <= static_cast<int>(list.size()); ++n) which.push_back(n);
  }
  bool all = true;
  for (int n : which) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = list[n - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-28s %s  (%.1fs)  %s\n", n, list[n - 1].first.c_str(), o.pass ? "PASS" : "FAIL", s,
                o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
