#include "fdm/cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fdm/errors.hpp"

namespace fdm {

namespace {

struct PivotFailure {
  int row;
  double value;
};

// Numeric row-oriented factorization on a given lower row pattern (diagonal last).
// Entries of `a` outside the pattern are dropped. Returns false on a nonpositive pivot.
bool factor_numeric(const CsrMatrix& a, const SparsityPattern& lower, double shift, CsrMatrix& l, PivotFailure& fail) {
  const int n = a.rows;
  l = CsrMatrix(n, n);
  l.row_ptr = lower.row_ptr;
  l.col_idx = lower.col_idx;
  l.values.assign(lower.col_idx.size(), 0.0);
  std::vector<double> w(n, 0.0);
  std::vector<char> in_row(n, 0);
  for (int k = 0; k < n; ++k) {
    const int b = lower.row_ptr[k], e = lower.row_ptr[k + 1];
    for (int q = b; q < e; ++q) in_row[lower.col_idx[q]] = 1;
    for (int q = a.row_ptr[k]; q < a.row_ptr[k + 1]; ++q) {
      const int j = a.col_idx[q];
      if (j <= k && in_row[j]) w[j] += a.values[q];
    }
    w[k] *= 1.0 + shift;
    double diag = w[k];
    for (int q = b; q < e - 1; ++q) {
      const int j = lower.col_idx[q];
      double s = w[j];
      const int jb = l.row_ptr[j], je = l.row_ptr[j + 1] - 1;
      for (int r = jb; r < je; ++r) s -= w[l.col_idx[r]] * l.values[r];
      s /= l.values[je];
      w[j] = s;
      diag -= s * s;
    }
    for (int q = b; q < e; ++q) in_row[lower.col_idx[q]] = 0;
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      for (int q = b; q < e; ++q) w[lower.col_idx[q]] = 0.0;
      fail = {k, diag};
      return false;
    }
    for (int q = b; q < e - 1; ++q) {
      l.values[q] = w[lower.col_idx[q]];
      w[lower.col_idx[q]] = 0.0;
    }
    l.values[e - 1] = std::sqrt(diag);
    w[k] = 0.0;
  }
  return true;
}

SparsityPattern lower_of(const SparsityPattern& full_permuted) {
  SparsityPattern lower;
  lower.n = full_permuted.n;
  lower.row_ptr.assign(static_cast<std::size_t>(lower.n) + 1, 0);
  for (int i = 0; i < lower.n; ++i) {
    for (int q = full_permuted.row_ptr[i]; q < full_permuted.row_ptr[i + 1]; ++q) {
      const int j = full_permuted.col_idx[q];
      if (j < i) lower.col_idx.push_back(j);
    }
    lower.col_idx.push_back(i);
    lower.row_ptr[i + 1] = static_cast<int>(lower.col_idx.size());
  }
  return lower;
}

SparsityPattern permute_pattern(const SparsityPattern& p, std::span<const int> perm) {
  const auto inv = inverse_permutation(perm);
  SparsityPattern out;
  out.n = p.n;
  out.row_ptr.assign(static_cast<std::size_t>(p.n) + 1, 0);
  std::vector<int> row;
  for (int i = 0; i < p.n; ++i) {
    const int old = perm[i];
    row.clear();
    for (int q = p.row_ptr[old]; q < p.row_ptr[old + 1]; ++q) row.push_back(inv[p.col_idx[q]]);
    std::sort(row.begin(), row.end());
    out.col_idx.insert(out.col_idx.end(), row.begin(), row.end());
    out.row_ptr[i + 1] = static_cast<int>(out.col_idx.size());
  }
  return out;
}

}  // namespace

void CholFactor::solve(std::span<const double> b, std::span<double> x, std::vector<double>& y) const {
  const int n = L.rows;
  if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
    throw InvalidArgument("CholFactor::solve: size mismatch");
  y.resize(n);
  for (int i = 0; i < n; ++i) y[i] = b[perm[i]];
  for (int i = 0; i < n; ++i) {
    const int e = L.row_ptr[i + 1] - 1;
    double s = y[i];
    for (int q = L.row_ptr[i]; q < e; ++q) s -= L.values[q] * y[L.col_idx[q]];
    y[i] = s / L.values[e];
  }
  for (int i = n - 1; i >= 0; --i) {
    const int e = L.row_ptr[i + 1] - 1;
    const double xi = y[i] / L.values[e];
    y[i] = xi;
    for (int q = L.row_ptr[i]; q < e; ++q) y[L.col_idx[q]] -= L.values[q] * xi;
  }
  for (int i = 0; i < n; ++i) x[perm[i]] = y[i];
}

Vector CholFactor::solve(const Vector& b) const {
  Vector x(b.size());
  std::vector<double> work;
  solve(std::span<const double>(b.data(), b.size()), std::span<double>(x.data(), x.size()), work);
  return x;
}

Matrix CholFactor::reconstruct() const {
  const Matrix l = L.to_dense();
  const Matrix llt = l * l.transpose();
  const int n = L.rows;
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(perm[i], perm[j]) = llt(i, j);
  return out;
}

std::vector<int> elimination_tree(const CsrMatrix& a) {
  const int n = a.rows;
  std::vector<int> parent(n, -1), ancestor(n, -1);
  for (int k = 0; k < n; ++k) {
    for (int q = a.row_ptr[k]; q < a.row_ptr[k + 1]; ++q) {
      int i = a.col_idx[q];
      while (i != -1 && i < k) {
        const int next = ancestor[i];
        ancestor[i] = k;
        if (next == -1) {
          parent[i] = k;
          break;
        }
        i = next;
      }
    }
  }
  return parent;
}

SparsityPattern symbolic_cholesky(const CsrMatrix& a) {
  const int n = a.rows;
  const auto parent = elimination_tree(a);
  SparsityPattern l;
  l.n = n;
  l.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> mark(n, -1), row;
  for (int k = 0; k < n; ++k) {
    row.clear();
    mark[k] = k;
    for (int q = a.row_ptr[k]; q < a.row_ptr[k + 1]; ++q) {
      for (int i = a.col_idx[q]; i < k && mark[i] != k; i = parent[i]) {
        mark[i] = k;
        row.push_back(i);
      }
    }
    std::sort(row.begin(), row.end());
    l.col_idx.insert(l.col_idx.end(), row.begin(), row.end());
    l.col_idx.push_back(k);
    l.row_ptr[k + 1] = static_cast<int>(l.col_idx.size());
  }
  return l;
}

std::int64_t cholesky_nnz(const CsrMatrix& a, std::span<const int> perm) {
  const CsrMatrix b = perm.empty() ? a : a.permuted(perm);
  const auto parent = elimination_tree(b);
  const int n = b.rows;
  std::vector<int> mark(n, -1);
  std::int64_t count = 0;
  for (int k = 0; k < n; ++k) {
    mark[k] = k;
    ++count;
    for (int q = b.row_ptr[k]; q < b.row_ptr[k + 1]; ++q)
      for (int i = b.col_idx[q]; i < k && mark[i] != k; i = parent[i]) {
        mark[i] = k;
        ++count;
      }
  }
  return count;
}

CholFactor cholesky_permuted(const CsrMatrix& a, std::vector<int> perm) {
  if (a.rows != a.cols) throw InvalidArgument("cholesky: matrix must be square");
  if (static_cast<int>(perm.size()) != a.rows) throw InvalidArgument("cholesky: permutation size mismatch");
  CholFactor f;
  f.perm = std::move(perm);
  const CsrMatrix b = a.permuted(f.perm);
  const SparsityPattern lower = symbolic_cholesky(b);
  PivotFailure fail{};
  if (!factor_numeric(b, lower, 0.0, f.L, fail))
    throw NumericalFailure("cholesky: nonpositive pivot " + std::to_string(fail.value) + " at row " +
                           std::to_string(f.perm[fail.row]));
  return f;
}

CholFactor cholesky(const CsrMatrix& a, Ordering ordering, std::span<const Point> points) {
  return cholesky_permuted(a, compute_ordering(a, ordering, points));
}

CholFactor icc_imposed(const CsrMatrix& a, const SparsityPattern& pattern, std::vector<int> perm,
                       const IccOptions& options) {
  if (a.rows != a.cols || pattern.n != a.rows) throw InvalidArgument("icc_imposed: size mismatch");
  if (perm.empty()) perm = natural_ordering(a.rows);
  for (int i = 0; i < a.rows; ++i)
    if (!pattern.contains(i, i)) throw InvalidArgument("icc_imposed: pattern must contain the diagonal");
  CholFactor f;
  f.perm = std::move(perm);
  const CsrMatrix b = a.permuted(f.perm);
  const SparsityPattern lower = lower_of(permute_pattern(pattern, f.perm));
  double sigma = 0.0;
  PivotFailure fail{};
  while (!factor_numeric(b, lower, sigma, f.L, fail)) {
    sigma = sigma == 0.0 ? options.initial_shift : 2.0 * sigma;
    ++f.restarts;
    if (sigma > options.max_shift)
      throw NumericalFailure("icc_imposed: breakdown at row " + std::to_string(f.perm[fail.row]) +
                             " persists with relative shift above " + std::to_string(options.max_shift));
  }
  f.shift = sigma;
  return f;
}

ScPattern sc_pattern(const CsrMatrix& a, std::span<const char> interior, std::span<const int> groups,
                     std::span<const Point> points) {
  const int n = a.rows;
  if (static_cast<int>(interior.size()) != n) throw InvalidArgument("sc_pattern: classification size mismatch");
  // Interior groups (singletons when no group ids are supplied).
  std::map<int, int> gid;
  std::vector<int> group_of(n, -1);
  std::vector<std::vector<int>> members;
  for (int i = 0; i < n; ++i) {
    if (!interior[i]) continue;
    const int key = groups.empty() ? -1 - i : groups[i];
    auto it = gid.try_emplace(key, static_cast<int>(members.size())).first;
    if (it->second == static_cast<int>(members.size())) members.emplace_back();
    group_of[i] = it->second;
    members[it->second].push_back(i);
  }
  // Interface neighbours of each group.
  std::vector<std::vector<int>> group_iface(members.size());
  for (std::size_t g = 0; g < members.size(); ++g) {
    for (int i : members[g])
      for (int q = a.row_ptr[i]; q < a.row_ptr[i + 1]; ++q)
        if (!interior[a.col_idx[q]]) group_iface[g].push_back(a.col_idx[q]);
    std::sort(group_iface[g].begin(), group_iface[g].end());
    group_iface[g].erase(std::unique(group_iface[g].begin(), group_iface[g].end()), group_iface[g].end());
  }
  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i)
    for (int q = a.row_ptr[i]; q < a.row_ptr[i + 1]; ++q) rows[i].push_back(a.col_idx[q]);
  for (int i = 0; i < n; ++i) rows[i].push_back(i);
  for (std::size_t g = 0; g < members.size(); ++g) {
    for (int i : members[g]) {
      rows[i].insert(rows[i].end(), members[g].begin(), members[g].end());
      rows[i].insert(rows[i].end(), group_iface[g].begin(), group_iface[g].end());
    }
    for (int x : group_iface[g]) {
      rows[x].insert(rows[x].end(), group_iface[g].begin(), group_iface[g].end());
      rows[x].insert(rows[x].end(), members[g].begin(), members[g].end());
    }
  }
  ScPattern out;
  out.pattern.n = n;
  out.pattern.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    out.pattern.col_idx.insert(out.pattern.col_idx.end(), r.begin(), r.end());
    out.pattern.row_ptr[i + 1] = static_cast<int>(out.pattern.col_idx.size());
    std::vector<int>().swap(r);
  }
  // Interiors first, grouped; then interfaces ordered by nested dissection of the condensed graph.
  for (const auto& m : members) out.perm.insert(out.perm.end(), m.begin(), m.end());
  std::vector<int> iface;
  for (int i = 0; i < n; ++i)
    if (!interior[i]) iface.push_back(i);
  if (!iface.empty()) {
    CsrMatrix g(n, n);
    g.row_ptr = out.pattern.row_ptr;
    g.col_idx = out.pattern.col_idx;
    g.values.assign(g.col_idx.size(), 1.0);
    const CsrMatrix gi = g.submatrix(iface);
    std::vector<Point> pts;
    if (static_cast<int>(points.size()) == n)
      for (int i : iface) pts.push_back(points[i]);
    const auto local = nested_dissection_ordering(gi, pts);
    for (int v : local) out.perm.push_back(iface[v]);
  }
  return out;
}

}  // namespace fdm
