#pragma once

#include <array>
#include <vector>

#include "fdm/elements.hpp"
#include "fdm/mesh.hpp"

namespace fdm {

enum class Dirichlet { all, none };

/// Global numbering of a k-form space on a structured mesh.
///
/// DOFs are sorted by owning entity (vertices, edges, faces, cells), then by component and
/// the local indices along the free directions of the owner. Free DOFs are renumbered
/// contiguously in the same order.
struct DofMap {
  ElementSpace element;
  Dirichlet dirichlet = Dirichlet::all;
  int num_dofs = 0;   // all DOFs, before masking
  int num_free = 0;   // unconstrained DOFs
  std::vector<int> cell_dofs;      // num_cells x element.size(), global DOF ids
  std::vector<int> owner;          // global DOF -> owning entity id
  std::vector<char> constrained;   // global DOF on Gamma_D
  std::vector<int> free_index;     // global DOF -> free id or -1
  std::vector<int> free_to_global;
  std::vector<int> owner_dim;      // per free DOF
  std::vector<int> interior_group; // per free DOF: (cell, i, j, l) group id for cell-owned DOFs, else -1
  std::vector<Point> location;     // per free DOF representative point
  int num_cells = 0;

  int local_size() const { return element.size(); }
  /// Free index of local DOF q on cell c, or -1.
  int cell_free(int c, int q) const { return free_index[cell_dofs[static_cast<std::size_t>(c) * element.size() + q]]; }
  std::vector<int> free_dofs_of_cell(int c) const;
  /// Free DOFs owned by the given entities.
  std::vector<int> free_dofs_owned_by(const MeshComplex& mesh, const std::vector<Entity>& entities) const;
  std::vector<char> cell_interior_mask() const;
};

DofMap build_dofmap(const MeshComplex& mesh, int k, int p, Dirichlet dirichlet);

}  // namespace fdm
