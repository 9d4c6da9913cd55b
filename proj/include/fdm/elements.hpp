#pragma once

#include <array>
#include <vector>

#include "fdm/fdm1d.hpp"
#include "fdm/sparse.hpp"

namespace fdm {

enum class Family { CG, DG };

struct ElementDof {
  int component;  // 0-based; scalar spaces use 0
  int i, j, l;
};

/// Tensor-product k-form element on [-1, 1]^3 in the FDM basis.
///
/// Component m of a k-form uses, per direction d, P_p (CG) or DP_{p-1} (DG):
///   k=0: CG CG CG;  k=1: DG in direction m;  k=2: CG in direction m;  k=3: DG DG DG.
/// Local numbering is component-major and then i fastest, l slowest.
struct ElementSpace {
  int k = 0;
  int p = 1;
  int num_components = 1;
  std::vector<std::array<Family, 3>> families;  // per component
  std::vector<int> offsets;                     // component offsets, size num_components + 1
  std::vector<ElementDof> dofs;
  std::vector<char> interior;                    // 1 if no CG index lies in {0, p}
  std::vector<int> group;                        // interior DOFs sharing (i,j,l) share a group id; -1 otherwise

  int size() const { return static_cast<int>(dofs.size()); }
  int extent(int component, int dir) const { return families[component][dir] == Family::CG ? p + 1 : p; }
  int index(int component, int i, int j, int l) const {
    return offsets[component] + i + extent(component, 0) * (j + extent(component, 1) * l);
  }
  int interior_count() const;
};

ElementSpace build_element(int k, int p);

/// Reference exterior derivative V^k -> V^{k+1} in FDM coefficients.
/// The curl block follows the sign convention of the FDM relation
/// curl Psi^(1)_ijl = lambda_j^{1/2} Phi^(3)_ijl - lambda_l^{1/2} Phi^(2)_ijl.
CsrMatrix reference_diff(int k, int p, const FdmBasis1D& basis);

/// FDM coefficients -> broken (fully L2-orthonormal) coefficients.
CsrMatrix broken_transform(int k, int p, const FdmBasis1D& basis);

/// 1D tables at the points of a quadrature rule; rows are points.
struct ElementTables {
  Matrix cg;             // s_j
  Matrix cg_derivative;  // s_j'
  Matrix dg;             // r_j
  Matrix broken;         // broken P_p basis
};

ElementTables tabulate_element(const FdmBasis1D& basis, const QuadratureRule& rule);

}  // namespace fdm
