#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fdm/fdm1d.hpp"
#include "fdm/sparse.hpp"

namespace fdm {

/// Static condensation of a sparse SPD matrix whose interior block is block diagonal with small dense blocks.
///
/// With the splitting into interior (I) and interface (G) rows,
///   S = P_GG - P_GI P_II^{-1} P_IG.
class CondensedOperator {
public:
  /// `groups` assigns a block id to each interior row; when empty, blocks are the connected components of P_II.
  /// Throws InvalidStructure if P_II couples different blocks or a block has more than max_block rows.
  CondensedOperator(const CsrMatrix& p, std::span<const char> interior, std::span<const int> groups = {},
                    int max_block = 3);

  int size() const { return n_; }
  int interface_size() const { return static_cast<int>(iface_.size()); }
  int interior_size() const { return static_cast<int>(inner_.size()); }
  const std::vector<int>& interface_dofs() const { return iface_; }
  const std::vector<int>& interior_dofs() const { return inner_; }
  const CsrMatrix& schur() const { return s_; }
  int max_block_size() const { return max_block_; }

  /// r_G - P_GI P_II^{-1} r_I
  Vector restrict_interface(const Vector& r) const;
  /// Full vector with interface values x_G and interior values -P_II^{-1} P_IG x_G.
  Vector extend(const Vector& xg) const;
  /// Interior solve P_II^{-1} r_I, zero on the interface.
  Vector interior_solve(const Vector& r) const;
  /// [x_G; P_II^{-1} (r_I - P_IG x_G)], equal to extend(xg) + interior_solve(r) in exact arithmetic.
  Vector complete(const Vector& xg, const Vector& r) const;
  /// P^{-1} r given an (approximate) interface solver.
  Vector apply_inverse(const Vector& r, const std::function<Vector(const Vector&)>& interface_solve) const;

private:
  void block_solve(const Vector& rhs_interior, Vector& out) const;

  int n_ = 0;
  std::vector<int> iface_, inner_;
  std::vector<int> block_ptr_;        // into inner ordering
  std::vector<double> block_inv_;     // dense Cholesky factors, row-major, packed
  std::vector<int> block_inv_ptr_;
  CsrMatrix p_gi_, p_ig_, s_;
  int max_block_ = 0;
};

}  // namespace fdm
