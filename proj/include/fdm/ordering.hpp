#pragma once

#include <span>
#include <string>
#include <vector>

#include "fdm/mesh.hpp"
#include "fdm/sparse.hpp"

namespace fdm {

enum class Ordering { natural, rcm, nested_dissection, amd };

/// perm[new] = old.
std::vector<int> natural_ordering(int n);
/// Reverse Cuthill-McKee, one BFS per connected component from a pseudo-peripheral start.
std::vector<int> rcm_ordering(const CsrMatrix& a);
/// Recursive coordinate bisection with one-sided vertex separators ordered last.
/// Without points, falls back to graph-distance levels from a peripheral vertex.
std::vector<int> nested_dissection_ordering(const CsrMatrix& a, std::span<const Point> points, int leaf_size = 16);

/// Approximate minimum degree (Eigen's AMD).
std::vector<int> amd_ordering(const CsrMatrix& a);

Ordering parse_ordering(const std::string& s);
std::string to_string(Ordering o);

std::vector<int> compute_ordering(const CsrMatrix& a, Ordering ordering, std::span<const Point> points = {});

std::vector<int> inverse_permutation(std::span<const int> perm);

/// Connected components of the graph of a symmetric matrix; returns a label per row.
std::vector<int> connected_components(const CsrMatrix& a, int* count = nullptr);

}  // namespace fdm
