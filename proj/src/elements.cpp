#include "fdm/elements.hpp"

#include <map>
#include <tuple>

#include "fdm/errors.hpp"

namespace fdm {

int ElementSpace::interior_count() const {
  int n = 0;
  for (char c : interior) n += c;
  return n;
}

ElementSpace build_element(int k, int p) {
  if (k < 0 || k > 3) throw InvalidArgument("build_element: form degree must be in 0..3");
  if (p < 1) throw InvalidArgument("build_element: p must be >= 1");
  ElementSpace e;
  e.k = k;
  e.p = p;
  e.num_components = (k == 0 || k == 3) ? 1 : 3;
  for (int m = 0; m < e.num_components; ++m) {
    std::array<Family, 3> f{};
    for (int d = 0; d < 3; ++d) {
      switch (k) {
        case 0: f[d] = Family::CG; break;
        case 1: f[d] = (d == m) ? Family::DG : Family::CG; break;
        case 2: f[d] = (d == m) ? Family::CG : Family::DG; break;
        default: f[d] = Family::DG; break;
      }
    }
    e.families.push_back(f);
  }
  e.offsets.push_back(0);
  for (int m = 0; m < e.num_components; ++m) {
    const int n0 = e.extent(m, 0), n1 = e.extent(m, 1), n2 = e.extent(m, 2);
    for (int l = 0; l < n2; ++l)
      for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n0; ++i) {
          e.dofs.push_back({m, i, j, l});
          const int idx[3] = {i, j, l};
          bool inner = true;
          for (int d = 0; d < 3; ++d)
            if (e.families[m][d] == Family::CG && (idx[d] == 0 || idx[d] == p)) inner = false;
          e.interior.push_back(inner ? 1 : 0);
        }
    e.offsets.push_back(static_cast<int>(e.dofs.size()));
  }
  std::map<std::tuple<int, int, int>, int> groups;
  e.group.assign(e.dofs.size(), -1);
  for (std::size_t q = 0; q < e.dofs.size(); ++q) {
    if (!e.interior[q]) continue;
    const auto key = std::make_tuple(e.dofs[q].i, e.dofs[q].j, e.dofs[q].l);
    auto it = groups.try_emplace(key, static_cast<int>(groups.size())).first;
    e.group[q] = it->second;
  }
  return e;
}

namespace {

// Places `block` (rows of component `rc` in `target`, cols of component `sc` in `source`).
void append_block(std::vector<Triplet>& out, const CsrMatrix& block, int row_offset, int col_offset,
                  double sign) {
  for (int i = 0; i < block.rows; ++i)
    for (int q = block.row_ptr[i]; q < block.row_ptr[i + 1]; ++q)
      out.push_back({row_offset + i, col_offset + block.col_idx[q], sign * block.values[q]});
}

Matrix factor(const ElementSpace& e, int comp, int dir, const Matrix& cg_to_dg, bool differentiate) {
  if (differentiate) return cg_to_dg;
  return Matrix::Identity(e.extent(comp, dir), e.extent(comp, dir));
}

// Block of d: source component sc -> target component tc, differentiating along dir.
CsrMatrix derivative_block(const ElementSpace& src, int sc, int dir, const Matrix& d1) {
  const Matrix fx = factor(src, sc, 0, d1, dir == 0);
  const Matrix fy = factor(src, sc, 1, d1, dir == 1);
  const Matrix fz = factor(src, sc, 2, d1, dir == 2);
  return kron3(fx, fy, fz);
}

}  // namespace

CsrMatrix reference_diff(int k, int p, const FdmBasis1D& basis) {
  if (k < 0 || k > 2) throw InvalidArgument("reference_diff: k must be in 0..2");
  if (basis.degree != p) throw InvalidArgument("reference_diff: basis degree mismatch");
  const ElementSpace src = build_element(k, p);
  const ElementSpace dst = build_element(k + 1, p);
  const Matrix& d1 = basis.D;
  std::vector<Triplet> t;
  if (k == 0) {
    for (int m = 0; m < 3; ++m) append_block(t, derivative_block(src, 0, m, d1), dst.offsets[m], 0, 1.0);
  } else if (k == 1) {
    // Target component n receives +d_b of source a and -d_a of source b, with (n, a, b) cyclic shifted
    // as Phi^(1) <- +d3 Psi^(2) - d2 Psi^(3), Phi^(2) <- +d1 Psi^(3) - d3 Psi^(1), Phi^(3) <- +d2 Psi^(1) - d1 Psi^(2).
    for (int n = 0; n < 3; ++n) {
      const int a = (n + 1) % 3;
      const int b = (n + 2) % 3;
      append_block(t, derivative_block(src, a, b, d1), dst.offsets[n], src.offsets[a], 1.0);
      append_block(t, derivative_block(src, b, a, d1), dst.offsets[n], src.offsets[b], -1.0);
    }
  } else {
    for (int m = 0; m < 3; ++m) append_block(t, derivative_block(src, m, m, d1), 0, src.offsets[m], 1.0);
  }
  return CsrMatrix::from_triplets(dst.size(), src.size(), std::move(t), true);
}

CsrMatrix broken_transform(int k, int p, const FdmBasis1D& basis) {
  if (basis.degree != p) throw InvalidArgument("broken_transform: basis degree mismatch");
  const ElementSpace e = build_element(k, p);
  std::vector<CsrMatrix> blocks;
  for (int m = 0; m < e.num_components; ++m) {
    Matrix f[3];
    for (int d = 0; d < 3; ++d)
      f[d] = e.families[m][d] == Family::CG ? basis.G1d : Matrix::Identity(p, p);
    blocks.push_back(kron3(f[0], f[1], f[2]));
  }
  return block_diagonal(blocks);
}

ElementTables tabulate_element(const FdmBasis1D& basis, const QuadratureRule& rule) {
  ElementTables t;
  t.cg = basis.tabulate_cg(rule.points);
  t.cg_derivative = basis.tabulate_cg_derivative(rule.points);
  t.dg = basis.tabulate_dg(rule.points);
  t.broken = t.cg * basis.G1d_inverse;
  return t;
}

}  // namespace fdm
