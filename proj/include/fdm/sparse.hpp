#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fdm {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col_idx;
  std::vector<double> values;
  bool symmetric = false;

  CsrMatrix() = default;
  CsrMatrix(int r, int c) : rows(r), cols(c), row_ptr(static_cast<std::size_t>(r) + 1, 0) {}

  /// Duplicate entries are summed. Explicit zeros are kept unless drop_zeros is set.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets, bool drop_zeros = false);
  static CsrMatrix identity(int n);
  static CsrMatrix diagonal(std::span<const double> d);
  static CsrMatrix from_dense(const Eigen::MatrixXd& a, double drop_tol = 0.0);

  std::int64_t nnz() const { return static_cast<std::int64_t>(col_idx.size()); }
  int row_nnz(int i) const { return row_ptr[i + 1] - row_ptr[i]; }

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y += a * A x
  void multiply_add(std::span<const double> x, std::span<double> y, double a = 1.0) const;
  /// y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

  CsrMatrix transpose() const;
  /// Entry lookup by binary search; zero when absent.
  double at(int i, int j) const;
  Eigen::VectorXd diagonal_values() const;
  Eigen::MatrixXd to_dense() const;

  /// Principal submatrix A(idx, idx); idx need not be sorted.
  CsrMatrix submatrix(std::span<const int> idx) const;
  /// A(ridx, cidx).
  CsrMatrix submatrix(std::span<const int> ridx, std::span<const int> cidx) const;
  /// P A P^T where row i of the result is row perm[i] of A.
  CsrMatrix permuted(std::span<const int> perm) const;

  CsrMatrix pruned(double tol = 0.0) const;
  CsrMatrix scaled(double s) const;

  /// Throws InvalidStructure if indices are out of range or unsorted.
  void validate() const;
  /// Max-abs asymmetry |a_ij - a_ji| (pattern differences count as the missing value).
  double asymmetry() const;
  double max_abs() const;
  std::size_t bytes() const;
};

/// C = A B (Gustavson).
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);
/// C = a A + b B
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double sa = 1.0, double sb = 1.0);

/// Kronecker product of three small dense factors, index i + n_x (j + n_y l).
CsrMatrix kron3(const Eigen::MatrixXd& ax, const Eigen::MatrixXd& ay, const Eigen::MatrixXd& az);

/// Stacks blocks diagonally.
CsrMatrix block_diagonal(std::span<const CsrMatrix> blocks);

/// Boolean pattern in row-compressed form (sorted columns per row).
struct SparsityPattern {
  int n = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col_idx;

  static SparsityPattern of(const CsrMatrix& a);
  std::int64_t nnz() const { return static_cast<std::int64_t>(col_idx.size()); }
  bool contains(int i, int j) const;
  bool includes(const SparsityPattern& other) const;
};

/// Coordinate-list text ("i j value" per line, 0-based) used by the spy command.
std::string to_coordinate_text(const CsrMatrix& a);

}  // namespace fdm
