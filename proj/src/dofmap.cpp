#include "fdm/dofmap.hpp"

#include <algorithm>

#include "fdm/errors.hpp"

namespace fdm {

std::vector<int> DofMap::free_dofs_of_cell(int c) const {
  std::vector<int> out;
  for (int q = 0; q < element.size(); ++q) {
    const int f = cell_free(c, q);
    if (f >= 0) out.push_back(f);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> DofMap::free_dofs_owned_by(const MeshComplex& mesh, const std::vector<Entity>& entities) const {
  std::vector<char> wanted(static_cast<std::size_t>(mesh.num_entities()), 0);
  for (const auto& e : entities) wanted[mesh.id(e)] = 1;
  std::vector<int> out;
  for (int f = 0; f < num_free; ++f)
    if (wanted[owner[free_to_global[f]]]) out.push_back(f);
  return out;
}

std::vector<char> DofMap::cell_interior_mask() const {
  std::vector<char> m(num_free);
  for (int f = 0; f < num_free; ++f) m[f] = owner_dim[f] == 3;
  return m;
}

DofMap build_dofmap(const MeshComplex& mesh, int k, int p, Dirichlet dirichlet) {
  DofMap map;
  map.element = build_element(k, p);
  map.dirichlet = dirichlet;
  const ElementSpace& el = map.element;
  const int nloc = el.size();
  const int ncell = mesh.num_cells();
  map.num_cells = ncell;
  const std::int64_t stride = static_cast<std::int64_t>(p + 1) * (p + 1) * (p + 1);
  const auto gll = gauss_lobatto_rule(p + 1).points;
  const auto gl = gauss_legendre_rule(p).points;

  std::vector<std::int64_t> keys(static_cast<std::size_t>(ncell) * nloc);
  std::vector<int> key_owner(keys.size());
  for (int c = 0; c < ncell; ++c) {
    const auto ci = mesh.cell_index(c);
    for (int q = 0; q < nloc; ++q) {
      const auto& d = el.dofs[q];
      const int idx[3] = {d.i, d.j, d.l};
      Entity e;
      int free_idx[3] = {0, 0, 0};
      for (int dir = 0; dir < 3; ++dir) {
        e.index[dir] = ci[dir];
        if (el.families[d.component][dir] == Family::CG && (idx[dir] == 0 || idx[dir] == p)) {
          e.pinned |= 1 << dir;
          if (idx[dir] == p) e.index[dir] += 1;
        } else {
          free_idx[dir] = idx[dir];
        }
      }
      const int owner = mesh.id(e);
      const std::int64_t key = owner * 3 * stride + d.component * stride + free_idx[0] +
                               (p + 1) * (free_idx[1] + static_cast<std::int64_t>(p + 1) * free_idx[2]);
      keys[static_cast<std::size_t>(c) * nloc + q] = key;
      key_owner[static_cast<std::size_t>(c) * nloc + q] = owner;
    }
  }
  std::vector<std::int64_t> unique_keys = keys;
  std::sort(unique_keys.begin(), unique_keys.end());
  unique_keys.erase(std::unique(unique_keys.begin(), unique_keys.end()), unique_keys.end());
  map.num_dofs = static_cast<int>(unique_keys.size());
  map.cell_dofs.resize(keys.size());
  map.owner.assign(map.num_dofs, -1);
  for (std::size_t t = 0; t < keys.size(); ++t) {
    const int g = static_cast<int>(std::lower_bound(unique_keys.begin(), unique_keys.end(), keys[t]) - unique_keys.begin());
    map.cell_dofs[t] = g;
    map.owner[g] = key_owner[t];
  }

  map.constrained.assign(map.num_dofs, 0);
  if (dirichlet == Dirichlet::all)
    for (int g = 0; g < map.num_dofs; ++g) map.constrained[g] = mesh.on_boundary(mesh.entity(map.owner[g]));
  map.free_index.assign(map.num_dofs, -1);
  for (int g = 0; g < map.num_dofs; ++g) {
    if (map.constrained[g]) continue;
    map.free_index[g] = static_cast<int>(map.free_to_global.size());
    map.free_to_global.push_back(g);
  }
  map.num_free = static_cast<int>(map.free_to_global.size());
  map.owner_dim.resize(map.num_free);
  for (int f = 0; f < map.num_free; ++f) map.owner_dim[f] = mesh.entity(map.owner[map.free_to_global[f]]).dim();

  map.interior_group.assign(map.num_free, -1);
  map.location.assign(map.num_free, Point::Zero());
  std::vector<char> located(map.num_free, 0);
  int groups_per_cell = 0;
  for (int g : el.group) groups_per_cell = std::max(groups_per_cell, g + 1);
  for (int c = 0; c < ncell; ++c) {
    for (int q = 0; q < nloc; ++q) {
      const int f = map.cell_free(c, q);
      if (f < 0) continue;
      if (el.group[q] >= 0) map.interior_group[f] = c * groups_per_cell + el.group[q];
      if (located[f]) continue;
      const auto& d = el.dofs[q];
      const int idx[3] = {d.i, d.j, d.l};
      Point xi;
      for (int dir = 0; dir < 3; ++dir)
        xi[dir] = el.families[d.component][dir] == Family::CG ? gll[idx[dir]] : gl[idx[dir]];
      map.location[f] = mesh.map(c, xi);
      located[f] = 1;
    }
  }
  return map;
}

}  // namespace fdm
