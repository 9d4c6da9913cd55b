#include "fdm/ordering.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

#include "fdm/errors.hpp"

namespace fdm {

std::vector<int> natural_ordering(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

std::vector<int> inverse_permutation(std::span<const int> perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

namespace {

int degree(const CsrMatrix& a, int v) {
  int d = 0;
  for (int q = a.row_ptr[v]; q < a.row_ptr[v + 1]; ++q) d += a.col_idx[q] != v;
  return d;
}

// BFS levels restricted to `active` vertices; returns the visit order and fills level[].
std::vector<int> bfs(const CsrMatrix& a, int start, std::vector<int>& level, const std::vector<char>& active,
                     bool sort_by_degree) {
  std::vector<int> order{start};
  level[start] = 0;
  std::vector<int> nbrs;
  for (std::size_t h = 0; h < order.size(); ++h) {
    const int v = order[h];
    nbrs.clear();
    for (int q = a.row_ptr[v]; q < a.row_ptr[v + 1]; ++q) {
      const int w = a.col_idx[q];
      if (active[w] && level[w] < 0) {
        level[w] = level[v] + 1;
        nbrs.push_back(w);
      }
    }
    if (sort_by_degree)
      std::stable_sort(nbrs.begin(), nbrs.end(), [&](int x, int y) { return degree(a, x) < degree(a, y); });
    order.insert(order.end(), nbrs.begin(), nbrs.end());
  }
  return order;
}

// `level` must be all -1 on entry and is restored before returning.
int pseudo_peripheral(const CsrMatrix& a, int start, const std::vector<char>& active, std::vector<int>& level) {
  int v = start, ecc = -1;
  for (int it = 0; it < 8; ++it) {
    const auto order = bfs(a, v, level, active, false);
    const int far_level = level[order.back()];
    int best = order.back();
    for (int w : order)
      if (level[w] == far_level && degree(a, w) < degree(a, best)) best = w;
    for (int w : order) level[w] = -1;
    if (far_level <= ecc) break;
    ecc = far_level;
    v = best;
  }
  return v;
}

}  // namespace

std::vector<int> rcm_ordering(const CsrMatrix& a) {
  const int n = a.rows;
  std::vector<int> perm;
  perm.reserve(n);
  std::vector<char> active(n, 1);
  std::vector<int> level(n, -1), scratch(n, -1);
  for (int s = 0; s < n; ++s) {
    if (level[s] >= 0) continue;
    const int start = pseudo_peripheral(a, s, active, scratch);
    const auto order = bfs(a, start, level, active, true);
    for (int v : order) active[v] = 0;
    perm.insert(perm.end(), order.rbegin(), order.rend());
  }
  return perm;
}

namespace {

// Leaf vertices by decreasing graph distance from the vertices that touch the rest of the graph,
// all of which are ordered later.
void order_leaf(const CsrMatrix& a, std::vector<int>& nodes, std::vector<char>& mark, std::vector<int>& out) {
  std::sort(nodes.begin(), nodes.end());
  for (int v : nodes) mark[v] = 3;
  std::vector<int> dist(nodes.size(), -1), queue;
  auto local = [&](int v) { return static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin()); };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int v = nodes[i];
    for (int q = a.row_ptr[v]; q < a.row_ptr[v + 1]; ++q)
      if (mark[a.col_idx[q]] != 3) {
        dist[i] = 0;
        queue.push_back(v);
        break;
      }
  }
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const int v = queue[h];
    for (int q = a.row_ptr[v]; q < a.row_ptr[v + 1]; ++q) {
      const int w = a.col_idx[q];
      if (mark[w] != 3) continue;
      const int lw = local(w);
      if (dist[lw] < 0) {
        dist[lw] = dist[local(v)] + 1;
        queue.push_back(w);
      }
    }
  }
  for (int v : nodes) mark[v] = 0;
  std::vector<int> idx(nodes.size());
  std::iota(idx.begin(), idx.end(), 0);
  const int far = static_cast<int>(nodes.size()) + 1;
  std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) {
    const int dx = dist[x] < 0 ? far : dist[x], dy = dist[y] < 0 ? far : dist[y];
    return dx > dy;
  });
  for (int i : idx) out.push_back(nodes[i]);
}

void dissect(const CsrMatrix& a, std::span<const Point> pts, std::vector<int>& nodes, int leaf, std::vector<char>& mark,
             std::vector<int>& out) {
  if (static_cast<int>(nodes.size()) <= leaf) {
    order_leaf(a, nodes, mark, out);
    return;
  }
  Point lo = pts[nodes[0]], hi = pts[nodes[0]];
  for (int v : nodes) {
    lo = lo.cwiseMin(pts[v]);
    hi = hi.cwiseMax(pts[v]);
  }
  int dir = 0;
  (hi - lo).maxCoeff(&dir);
  std::sort(nodes.begin(), nodes.end(), [&](int x, int y) {
    if (pts[x][dir] != pts[y][dir]) return pts[x][dir] < pts[y][dir];
    return x < y;
  });
  const std::size_t mid = nodes.size() / 2;
  // mark: 1 = left, 2 = right.
  for (std::size_t i = 0; i < nodes.size(); ++i) mark[nodes[i]] = i < mid ? 1 : 2;
  std::vector<int> left, right, sep;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int v = nodes[i];
    if (mark[v] == 2) {
      right.push_back(v);
      continue;
    }
    bool touches = false;
    for (int q = a.row_ptr[v]; q < a.row_ptr[v + 1] && !touches; ++q) touches = mark[a.col_idx[q]] == 2;
    (touches ? sep : left).push_back(v);
  }
  for (int v : nodes) mark[v] = 0;
  if (left.empty() || right.empty()) {
    order_leaf(a, nodes, mark, out);
    return;
  }
  dissect(a, pts, left, leaf, mark, out);
  dissect(a, pts, right, leaf, mark, out);
  std::sort(sep.begin(), sep.end());
  out.insert(out.end(), sep.begin(), sep.end());
}

}  // namespace

std::vector<int> nested_dissection_ordering(const CsrMatrix& a, std::span<const Point> points, int leaf_size) {
  const int n = a.rows;
  std::vector<Point> fallback;
  if (static_cast<int>(points.size()) != n) {
    // Graph coordinates: BFS distances from two far-apart vertices.
    fallback.assign(n, Point::Zero());
    std::vector<char> active(n, 1);
    std::vector<int> lu(n, -1), lw(n, -1), scratch(n, -1);
    for (int s = 0; s < n; ++s) {
      if (fallback[s][2] != 0.0) continue;
      const int u = pseudo_peripheral(a, s, active, scratch);
      const auto order = bfs(a, u, lu, active, false);
      bfs(a, order.back(), lw, active, false);
      for (int v : order) {
        fallback[v] = Point(lu[v], lw[v], 1.0 + s);
        active[v] = 0;
      }
    }
    points = fallback;
  }
  std::vector<int> nodes = natural_ordering(n), out;
  out.reserve(n);
  std::vector<char> mark(n, 0);
  dissect(a, points, nodes, std::max(leaf_size, 1), mark, out);
  return out;
}

std::vector<int> amd_ordering(const CsrMatrix& a) {
  const int n = a.rows;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.col_idx.size());
  for (int i = 0; i < n; ++i)
    for (int q = a.row_ptr[i]; q < a.row_ptr[i + 1]; ++q)
      if (a.col_idx[q] <= i) t.emplace_back(i, a.col_idx[q], 1.0);
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
  Eigen::AMDOrdering<int> amd;
  amd(m.selfadjointView<Eigen::Lower>(), perm);
  return std::vector<int>(perm.indices().data(), perm.indices().data() + n);
}

Ordering parse_ordering(const std::string& s) {
  if (s == "natural") return Ordering::natural;
  if (s == "rcm") return Ordering::rcm;
  if (s == "nd" || s == "nested_dissection") return Ordering::nested_dissection;
  if (s == "amd") return Ordering::amd;
  throw InvalidArgument("unknown ordering '" + s + "'");
}

std::string to_string(Ordering o) {
  switch (o) {
    case Ordering::natural: return "natural";
    case Ordering::rcm: return "rcm";
    case Ordering::nested_dissection: return "nd";
    case Ordering::amd: return "amd";
  }
  return "?";
}

std::vector<int> compute_ordering(const CsrMatrix& a, Ordering ordering, std::span<const Point> points) {
  switch (ordering) {
    case Ordering::natural: return natural_ordering(a.rows);
    case Ordering::rcm: return rcm_ordering(a);
    case Ordering::nested_dissection: return nested_dissection_ordering(a, points);
    case Ordering::amd: return amd_ordering(a);
  }
  throw InvalidArgument("unknown ordering");
}

std::vector<int> connected_components(const CsrMatrix& a, int* count) {
  std::vector<int> label(a.rows, -1);
  int ncomp = 0;
  std::vector<int> stack;
  for (int s = 0; s < a.rows; ++s) {
    if (label[s] >= 0) continue;
    label[s] = ncomp;
    stack.push_back(s);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int q = a.row_ptr[v]; q < a.row_ptr[v + 1]; ++q) {
        const int w = a.col_idx[q];
        if (label[w] < 0) {
          label[w] = ncomp;
          stack.push_back(w);
        }
      }
    }
    ++ncomp;
  }
  if (count) *count = ncomp;
  return label;
}

}  // namespace fdm
