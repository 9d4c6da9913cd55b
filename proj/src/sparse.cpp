#include "fdm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fdm/errors.hpp"

namespace fdm {

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets, bool drop_zeros) {
  CsrMatrix a(rows, cols);
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw InvalidArgument("CsrMatrix::from_triplets: index out of range");
    ++a.row_ptr[t.row + 1];
  }
  for (int i = 0; i < rows; ++i) a.row_ptr[i + 1] += a.row_ptr[i];
  std::vector<int> cols_tmp(triplets.size());
  std::vector<double> vals_tmp(triplets.size());
  std::vector<int> next(a.row_ptr.begin(), a.row_ptr.end() - 1);
  for (const auto& t : triplets) {
    const int pos = next[t.row]++;
    cols_tmp[pos] = t.col;
    vals_tmp[pos] = t.value;
  }
  triplets.clear();
  triplets.shrink_to_fit();

  std::vector<int> out_ptr(static_cast<std::size_t>(rows) + 1, 0);
  a.col_idx.reserve(cols_tmp.size());
  a.values.reserve(cols_tmp.size());
  std::vector<int> order;
  for (int i = 0; i < rows; ++i) {
    const int b = a.row_ptr[i], e = a.row_ptr[i + 1];
    order.resize(e - b);
    std::iota(order.begin(), order.end(), b);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return cols_tmp[x] < cols_tmp[y]; });
    std::size_t start = a.col_idx.size();
    for (int idx : order) {
      if (a.col_idx.size() > start && a.col_idx.back() == cols_tmp[idx]) {
        a.values.back() += vals_tmp[idx];
      } else {
        a.col_idx.push_back(cols_tmp[idx]);
        a.values.push_back(vals_tmp[idx]);
      }
    }
    if (drop_zeros) {
      std::size_t w = start;
      for (std::size_t r = start; r < a.col_idx.size(); ++r) {
        if (a.values[r] != 0.0) {
          a.col_idx[w] = a.col_idx[r];
          a.values[w] = a.values[r];
          ++w;
        }
      }
      a.col_idx.resize(w);
      a.values.resize(w);
    }
    out_ptr[i + 1] = static_cast<int>(a.col_idx.size());
  }
  a.row_ptr = std::move(out_ptr);
  return a;
}

CsrMatrix CsrMatrix::identity(int n) {
  CsrMatrix a(n, n);
  a.col_idx.resize(n);
  a.values.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    a.row_ptr[i + 1] = i + 1;
    a.col_idx[i] = i;
  }
  a.symmetric = true;
  return a;
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> d) {
  CsrMatrix a = identity(static_cast<int>(d.size()));
  std::copy(d.begin(), d.end(), a.values.begin());
  return a;
}

CsrMatrix CsrMatrix::from_dense(const Eigen::MatrixXd& m, double drop_tol) {
  CsrMatrix a(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      if (std::abs(m(i, j)) > drop_tol || (drop_tol == 0.0 && m(i, j) != 0.0)) {
        a.col_idx.push_back(j);
        a.values.push_back(m(i, j));
      }
    }
    a.row_ptr[i + 1] = static_cast<int>(a.col_idx.size());
  }
  return a;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols || static_cast<int>(y.size()) != rows)
    throw InvalidArgument("CsrMatrix::multiply: size mismatch");
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) s += values[q] * x[col_idx[q]];
    y[i] = s;
  }
}

void CsrMatrix::multiply_add(std::span<const double> x, std::span<double> y, double a) const {
  if (static_cast<int>(x.size()) != cols || static_cast<int>(y.size()) != rows)
    throw InvalidArgument("CsrMatrix::multiply_add: size mismatch");
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) s += values[q] * x[col_idx[q]];
    y[i] += a * s;
  }
}

void CsrMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != rows || static_cast<int>(y.size()) != cols)
    throw InvalidArgument("CsrMatrix::multiply_transpose: size mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < rows; ++i)
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) y[col_idx[q]] += values[q] * x[i];
}

Eigen::VectorXd CsrMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(rows);
  multiply(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix t(cols, rows);
  for (int c : col_idx) ++t.row_ptr[c + 1];
  for (int i = 0; i < cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  t.col_idx.resize(col_idx.size());
  t.values.resize(values.size());
  std::vector<int> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (int i = 0; i < rows; ++i) {
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
      const int pos = next[col_idx[q]]++;
      t.col_idx[pos] = i;
      t.values[pos] = values[q];
    }
  }
  t.symmetric = symmetric;
  return t;
}

double CsrMatrix::at(int i, int j) const {
  const auto b = col_idx.begin() + row_ptr[i];
  const auto e = col_idx.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return values[it - col_idx.begin()];
}

Eigen::VectorXd CsrMatrix::diagonal_values() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(std::min(rows, cols));
  for (int i = 0; i < d.size(); ++i) d(i) = at(i, i);
  return d;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) m(i, col_idx[q]) += values[q];
  return m;
}

CsrMatrix CsrMatrix::submatrix(std::span<const int> idx) const { return submatrix(idx, idx); }

CsrMatrix CsrMatrix::submatrix(std::span<const int> ridx, std::span<const int> cidx) const {
  std::vector<int> local(cols, -1);
  for (std::size_t k = 0; k < cidx.size(); ++k) local[cidx[k]] = static_cast<int>(k);
  CsrMatrix s(static_cast<int>(ridx.size()), static_cast<int>(cidx.size()));
  std::vector<std::pair<int, double>> row;
  for (std::size_t r = 0; r < ridx.size(); ++r) {
    const int i = ridx[r];
    row.clear();
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
      const int c = local[col_idx[q]];
      if (c >= 0) row.emplace_back(c, values[q]);
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [c, v] : row) {
      s.col_idx.push_back(c);
      s.values.push_back(v);
    }
    s.row_ptr[r + 1] = static_cast<int>(s.col_idx.size());
  }
  s.symmetric = symmetric && ridx.size() == cidx.size() && std::equal(ridx.begin(), ridx.end(), cidx.begin());
  return s;
}

CsrMatrix CsrMatrix::permuted(std::span<const int> perm) const {
  CsrMatrix s = submatrix(perm, perm);
  s.symmetric = symmetric;
  return s;
}

CsrMatrix CsrMatrix::pruned(double tol) const {
  CsrMatrix s(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
      if (std::abs(values[q]) > tol) {
        s.col_idx.push_back(col_idx[q]);
        s.values.push_back(values[q]);
      }
    }
    s.row_ptr[i + 1] = static_cast<int>(s.col_idx.size());
  }
  s.symmetric = symmetric;
  return s;
}

CsrMatrix CsrMatrix::scaled(double factor) const {
  CsrMatrix s = *this;
  for (double& v : s.values) v *= factor;
  return s;
}

void CsrMatrix::validate() const {
  if (static_cast<int>(row_ptr.size()) != rows + 1 || row_ptr[0] != 0 ||
      row_ptr[rows] != static_cast<int>(col_idx.size()) || col_idx.size() != values.size())
    throw InvalidStructure("CsrMatrix: inconsistent array sizes");
  for (int i = 0; i < rows; ++i) {
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
      if (col_idx[q] < 0 || col_idx[q] >= cols) throw InvalidStructure("CsrMatrix: column out of range");
      if (q > row_ptr[i] && col_idx[q] <= col_idx[q - 1])
        throw InvalidStructure("CsrMatrix: columns not strictly increasing in row " + std::to_string(i));
    }
  }
}

double CsrMatrix::asymmetry() const {
  if (rows != cols) return INFINITY;
  double worst = 0.0;
  for (int i = 0; i < rows; ++i)
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q)
      worst = std::max(worst, std::abs(values[q] - at(col_idx[q], i)));
  return worst;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::size_t CsrMatrix::bytes() const {
  return row_ptr.size() * sizeof(int) + col_idx.size() * sizeof(int) + values.size() * sizeof(double);
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols != b.rows) throw InvalidArgument("multiply: inner dimension mismatch");
  CsrMatrix c(a.rows, b.cols);
  std::vector<int> marker(b.cols, -1);
  std::vector<double> acc(b.cols, 0.0);
  std::vector<int> cols;
  for (int i = 0; i < a.rows; ++i) {
    cols.clear();
    for (int qa = a.row_ptr[i]; qa < a.row_ptr[i + 1]; ++qa) {
      const int k = a.col_idx[qa];
      const double av = a.values[qa];
      for (int qb = b.row_ptr[k]; qb < b.row_ptr[k + 1]; ++qb) {
        const int j = b.col_idx[qb];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          cols.push_back(j);
        }
        acc[j] += av * b.values[qb];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (int j : cols) {
      c.col_idx.push_back(j);
      c.values.push_back(acc[j]);
    }
    c.row_ptr[i + 1] = static_cast<int>(c.col_idx.size());
  }
  return c;
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double sa, double sb) {
  if (a.rows != b.rows || a.cols != b.cols) throw InvalidArgument("add: dimension mismatch");
  CsrMatrix c(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i) {
    int qa = a.row_ptr[i], qb = b.row_ptr[i];
    const int ea = a.row_ptr[i + 1], eb = b.row_ptr[i + 1];
    while (qa < ea || qb < eb) {
      if (qb >= eb || (qa < ea && a.col_idx[qa] < b.col_idx[qb])) {
        c.col_idx.push_back(a.col_idx[qa]);
        c.values.push_back(sa * a.values[qa]);
        ++qa;
      } else if (qa >= ea || b.col_idx[qb] < a.col_idx[qa]) {
        c.col_idx.push_back(b.col_idx[qb]);
        c.values.push_back(sb * b.values[qb]);
        ++qb;
      } else {
        c.col_idx.push_back(a.col_idx[qa]);
        c.values.push_back(sa * a.values[qa] + sb * b.values[qb]);
        ++qa;
        ++qb;
      }
    }
    c.row_ptr[i + 1] = static_cast<int>(c.col_idx.size());
  }
  c.symmetric = a.symmetric && b.symmetric;
  return c;
}

CsrMatrix kron3(const Eigen::MatrixXd& ax, const Eigen::MatrixXd& ay, const Eigen::MatrixXd& az) {
  const int rx = static_cast<int>(ax.rows()), ry = static_cast<int>(ay.rows()), rz = static_cast<int>(az.rows());
  const int cx = static_cast<int>(ax.cols()), cy = static_cast<int>(ay.cols()), cz = static_cast<int>(az.cols());
  CsrMatrix k(rx * ry * rz, cx * cy * cz);
  int row = 0;
  for (int l = 0; l < rz; ++l) {
    for (int j = 0; j < ry; ++j) {
      for (int i = 0; i < rx; ++i, ++row) {
        for (int c = 0; c < cz; ++c) {
          if (az(l, c) == 0.0) continue;
          for (int b = 0; b < cy; ++b) {
            if (ay(j, b) == 0.0) continue;
            for (int a = 0; a < cx; ++a) {
              if (ax(i, a) == 0.0) continue;
              k.col_idx.push_back(a + cx * (b + cy * c));
              k.values.push_back(ax(i, a) * ay(j, b) * az(l, c));
            }
          }
        }
        k.row_ptr[row + 1] = static_cast<int>(k.col_idx.size());
      }
    }
  }
  return k;
}

CsrMatrix block_diagonal(std::span<const CsrMatrix> blocks) {
  int rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows;
    cols += b.cols;
  }
  CsrMatrix m(rows, cols);
  int r0 = 0, c0 = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows; ++i) {
      for (int q = b.row_ptr[i]; q < b.row_ptr[i + 1]; ++q) {
        m.col_idx.push_back(c0 + b.col_idx[q]);
        m.values.push_back(b.values[q]);
      }
      m.row_ptr[r0 + i + 1] = static_cast<int>(m.col_idx.size());
    }
    r0 += b.rows;
    c0 += b.cols;
  }
  return m;
}

SparsityPattern SparsityPattern::of(const CsrMatrix& a) {
  SparsityPattern p;
  p.n = a.rows;
  p.row_ptr = a.row_ptr;
  p.col_idx = a.col_idx;
  return p;
}

bool SparsityPattern::contains(int i, int j) const {
  const auto b = col_idx.begin() + row_ptr[i];
  const auto e = col_idx.begin() + row_ptr[i + 1];
  return std::binary_search(b, e, j);
}

bool SparsityPattern::includes(const SparsityPattern& other) const {
  if (other.n != n) return false;
  for (int i = 0; i < n; ++i)
    for (int q = other.row_ptr[i]; q < other.row_ptr[i + 1]; ++q)
      if (!contains(i, other.col_idx[q])) return false;
  return true;
}

std::string to_coordinate_text(const CsrMatrix& a) {
  std::ostringstream out;
  out.precision(17);
  out << "# " << a.rows << " " << a.cols << " " << a.nnz() << "\n";
  for (int i = 0; i < a.rows; ++i)
    for (int q = a.row_ptr[i]; q < a.row_ptr[i + 1]; ++q) out << i << " " << a.col_idx[q] << " " << a.values[q] << "\n";
  return out.str();
}

}  // namespace fdm
