#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fdm/fdm1d.hpp"
#include "fdm/mesh.hpp"
#include "fdm/ordering.hpp"
#include "fdm/sparse.hpp"

namespace fdm {

/// Sparse (possibly incomplete) Cholesky factor of P A P^T.
/// L is stored by rows in the permuted numbering with the diagonal last in each row.
struct CholFactor {
  std::vector<int> perm;  // perm[new] = old
  CsrMatrix L;
  double shift = 0.0;     // relative diagonal shift applied before factoring (ICC only)
  int restarts = 0;

  int size() const { return L.rows; }
  std::int64_t nnz() const { return L.nnz(); }
  std::size_t bytes() const { return L.bytes() + perm.size() * sizeof(int); }

  /// x = (L L^T)^{-1} b in the original numbering; x may alias b.
  void solve(std::span<const double> b, std::span<double> x, std::vector<double>& work) const;
  Vector solve(const Vector& b) const;
  /// L L^T mapped back to the original numbering.
  Matrix reconstruct() const;
};

/// Elimination tree of a symmetric matrix (lower triangle used); parent -1 marks roots.
std::vector<int> elimination_tree(const CsrMatrix& a);

/// Row patterns of the exact Cholesky factor (lower, diagonal last).
SparsityPattern symbolic_cholesky(const CsrMatrix& a);

/// nnz(L) of the exact factor of P A P^T, without numeric work.
std::int64_t cholesky_nnz(const CsrMatrix& a, std::span<const int> perm);

CholFactor cholesky(const CsrMatrix& a, Ordering ordering, std::span<const Point> points = {});
CholFactor cholesky_permuted(const CsrMatrix& a, std::vector<int> perm);

struct IccOptions {
  double initial_shift = 1e-10;  // relative to each diagonal entry
  double max_shift = 1e-2;
};

/// Incomplete Cholesky restricted to `pattern` (symmetric pattern in the original numbering, must contain
/// the diagonal). On breakdown, retries with A + sigma diag(A), sigma doubling from initial_shift.
CholFactor icc_imposed(const CsrMatrix& a, const SparsityPattern& pattern, std::vector<int> perm,
                       const IccOptions& options = {});

struct ScPattern {
  std::vector<int> perm;      // interiors first (grouped), then interfaces in nested dissection order
  SparsityPattern pattern;    // symmetric, original numbering
};

/// Pattern of A united with the pattern of its interface Schur complement, treating the interior block
/// as block diagonal over `groups` (group id per row, ignored for interface rows).
ScPattern sc_pattern(const CsrMatrix& a, std::span<const char> interior, std::span<const int> groups,
                     std::span<const Point> points = {});

}  // namespace fdm
