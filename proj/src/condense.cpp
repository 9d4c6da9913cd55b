#include "fdm/condense.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "fdm/errors.hpp"
#include "fdm/ordering.hpp"

namespace fdm {

CondensedOperator::CondensedOperator(const CsrMatrix& p, std::span<const char> interior, std::span<const int> groups,
                                     int max_block)
    : n_(p.rows) {
  if (p.rows != p.cols || static_cast<int>(interior.size()) != n_)
    throw InvalidArgument("CondensedOperator: size mismatch");
  if (!groups.empty() && static_cast<int>(groups.size()) != n_)
    throw InvalidArgument("CondensedOperator: group array size mismatch");
  std::vector<int> all_inner;
  for (int i = 0; i < n_; ++i) (interior[i] ? all_inner : iface_).push_back(i);

  const CsrMatrix pii = p.submatrix(all_inner);
  std::vector<int> label;
  if (groups.empty()) {
    label = connected_components(pii);
  } else {
    std::map<int, int> ids;
    label.resize(all_inner.size());
    for (std::size_t a = 0; a < all_inner.size(); ++a)
      label[a] = ids.try_emplace(groups[all_inner[a]], static_cast<int>(ids.size())).first->second;
    for (int a = 0; a < pii.rows; ++a)
      for (int q = pii.row_ptr[a]; q < pii.row_ptr[a + 1]; ++q)
        if (label[pii.col_idx[q]] != label[a] && pii.values[q] != 0.0)
          throw InvalidStructure("CondensedOperator: interior block couples rows " + std::to_string(all_inner[a]) +
                                 " and " + std::to_string(all_inner[pii.col_idx[q]]) + " of different groups");
  }
  int nblocks = 0;
  for (int l : label) nblocks = std::max(nblocks, l + 1);
  std::vector<std::vector<int>> members(nblocks);
  for (std::size_t a = 0; a < label.size(); ++a) members[label[a]].push_back(static_cast<int>(a));

  block_ptr_.assign(1, 0);
  block_inv_ptr_.assign(1, 0);
  std::vector<int> local_order;
  std::vector<Triplet> linv_entries;
  for (const auto& m : members) {
    const int b = static_cast<int>(m.size());
    if (b > max_block)
      throw InvalidStructure("CondensedOperator: interior block of size " + std::to_string(b) + " exceeds " +
                             std::to_string(max_block));
    max_block_ = std::max(max_block_, b);
    Matrix blk(b, b);
    for (int r = 0; r < b; ++r)
      for (int c = 0; c < b; ++c) blk(r, c) = pii.at(m[r], m[c]);
    Eigen::LLT<Matrix> llt(blk);
    if (llt.info() != Eigen::Success)
      throw NumericalFailure("CondensedOperator: interior block at row " + std::to_string(all_inner[m[0]]) +
                             " is not positive definite");
    const Matrix lb = llt.matrixL();
    const Matrix linv = llt.matrixL().solve(Matrix::Identity(b, b));
    for (int r = 0; r < b; ++r)
      for (int c = 0; c < b; ++c) block_inv_.push_back(lb(r, c));
    for (int r = 0; r < b; ++r)
      for (int c = 0; c <= r; ++c) linv_entries.push_back({static_cast<int>(local_order.size()) + r,
                                                    static_cast<int>(local_order.size()) + c, linv(r, c)});
    block_inv_ptr_.push_back(static_cast<int>(block_inv_.size()));
    local_order.insert(local_order.end(), m.begin(), m.end());
    block_ptr_.push_back(static_cast<int>(local_order.size()));
  }
  for (int a : local_order) inner_.push_back(all_inner[a]);

  // S = P_GG - W^T W with W = L_II^{-1} P_IG keeps the subtraction symmetric positive semidefinite.
  const int ni = static_cast<int>(inner_.size());
  const CsrMatrix linv = CsrMatrix::from_triplets(ni, ni, std::move(linv_entries));
  p_gi_ = p.submatrix(iface_, inner_);
  p_ig_ = p.submatrix(inner_, iface_);
  const CsrMatrix w = multiply(linv, p_ig_);
  s_ = add(p.submatrix(iface_), multiply(w.transpose(), w), 1.0, -1.0);
  s_.symmetric = true;
}

void CondensedOperator::block_solve(const Vector& rhs, Vector& out) const {
  out.resize(rhs.size());
  for (int g = 0; g + 1 < static_cast<int>(block_ptr_.size()); ++g) {
    const int b0 = block_ptr_[g], b = block_ptr_[g + 1] - b0;
    const double* l = block_inv_.data() + block_inv_ptr_[g];
    double* y = out.data() + b0;
    for (int r = 0; r < b; ++r) {
      double s = rhs[b0 + r];
      for (int c = 0; c < r; ++c) s -= l[r * b + c] * y[c];
      y[r] = s / l[r * b + r];
    }
    for (int r = b - 1; r >= 0; --r) {
      double s = y[r];
      for (int c = r + 1; c < b; ++c) s -= l[c * b + r] * y[c];
      y[r] = s / l[r * b + r];
    }
  }
}

Vector CondensedOperator::restrict_interface(const Vector& r) const {
  Vector ri(inner_.size()), y;
  for (std::size_t a = 0; a < inner_.size(); ++a) ri[a] = r[inner_[a]];
  block_solve(ri, y);
  Vector out(iface_.size());
  for (std::size_t a = 0; a < iface_.size(); ++a) out[a] = r[iface_[a]];
  p_gi_.multiply_add(std::span<const double>(y.data(), y.size()), std::span<double>(out.data(), out.size()), -1.0);
  return out;
}

Vector CondensedOperator::extend(const Vector& xg) const {
  Vector t(inner_.size()), y;
  p_ig_.multiply(std::span<const double>(xg.data(), xg.size()), std::span<double>(t.data(), t.size()));
  block_solve(t, y);
  Vector out = Vector::Zero(n_);
  for (std::size_t a = 0; a < iface_.size(); ++a) out[iface_[a]] = xg[a];
  for (std::size_t a = 0; a < inner_.size(); ++a) out[inner_[a]] = -y[a];
  return out;
}

Vector CondensedOperator::interior_solve(const Vector& r) const {
  Vector ri(inner_.size()), y;
  for (std::size_t a = 0; a < inner_.size(); ++a) ri[a] = r[inner_[a]];
  block_solve(ri, y);
  Vector out = Vector::Zero(n_);
  for (std::size_t a = 0; a < inner_.size(); ++a) out[inner_[a]] = y[a];
  return out;
}

Vector CondensedOperator::complete(const Vector& xg, const Vector& r) const {
  Vector t(inner_.size()), y;
  for (std::size_t a = 0; a < inner_.size(); ++a) t[a] = r[inner_[a]];
  p_ig_.multiply_add(std::span<const double>(xg.data(), xg.size()), std::span<double>(t.data(), t.size()), -1.0);
  block_solve(t, y);
  Vector out(n_);
  for (std::size_t a = 0; a < iface_.size(); ++a) out[iface_[a]] = xg[a];
  for (std::size_t a = 0; a < inner_.size(); ++a) out[inner_[a]] = y[a];
  return out;
}

Vector CondensedOperator::apply_inverse(const Vector& r,
                                        const std::function<Vector(const Vector&)>& interface_solve) const {
  return complete(interface_solve(restrict_interface(r)), r);
}

}  // namespace fdm
