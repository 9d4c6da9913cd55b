#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fdm {

using Point = Eigen::Vector3d;

/// Cell complex entity on a logically structured grid.
/// Bit d of `pinned` is set when coordinate d sits on a grid plane (index in 0..n_d);
/// otherwise the entity spans the cell interval index..index+1 (index in 0..n_d-1).
struct Entity {
  int pinned = 0;
  std::array<int, 3> index{0, 0, 0};

  int dim() const { return 3 - __builtin_popcount(static_cast<unsigned>(pinned)); }
  bool operator==(const Entity&) const = default;
};

struct Distortion {
  enum class Kind { none, smooth, jitter };
  Kind kind = Kind::none;
  double amplitude = 0.0;
  std::uint64_t seed = 0;

  static Distortion none() { return {}; }
  static Distortion smooth(double a) { return {Kind::smooth, a, 0}; }
  static Distortion jitter(double a, std::uint64_t seed) { return {Kind::jitter, a, seed}; }
};

/// Logically structured hexahedral cell complex of the unit box.
class MeshComplex {
public:
  MeshComplex(int nx, int ny, int nz);

  int extent(int d) const { return n_[d]; }
  const std::array<int, 3>& extents() const { return n_; }

  int num_vertices() const { return count(7); }
  int num_cells() const { return count(0); }
  int num_entities(int dim) const;
  int num_entities() const { return total_; }
  /// Number of entities with a given pinned mask.
  int count(int pinned) const;

  /// Global id: vertices, then x/y/z edges, x/y/z-normal faces, cells; lexicographic inside each class.
  int id(const Entity& e) const;
  Entity entity(int id) const;
  bool valid(const Entity& e) const;

  /// Entities of one lower dimension in the closure.
  std::vector<Entity> boundary(const Entity& e) const;
  /// All entities of the closure including e.
  std::vector<Entity> closure(const Entity& e) const;
  /// The entity together with all entities that contain it.
  std::vector<Entity> star(const Entity& e) const;
  std::vector<int> star_cells(const Entity& e) const;
  /// True if the entity lies in the boundary of the unit box.
  bool on_boundary(const Entity& e) const;

  /// Cell id <-> (i, j, k).
  int cell_id(int i, int j, int k) const { return i + n_[0] * (j + n_[1] * k); }
  std::array<int, 3> cell_index(int c) const;
  int vertex_id(int i, int j, int k) const { return i + (n_[0] + 1) * (j + (n_[1] + 1) * k); }

  const std::vector<Point>& coordinates() const { return coords_; }
  std::vector<Point>& coordinates() { return coords_; }
  /// Corner coordinates of a cell, index a + 2 b + 4 c for the corner (i+a, j+b, k+c).
  std::array<Point, 8> cell_corners(int c) const;

  /// Trilinear map of cell c at reference point xi in [-1, 1]^3.
  Point map(int c, const Point& xi) const;
  Eigen::Matrix3d jacobian(int c, const Point& xi) const;

  /// Minimum Jacobian determinant over an (n x n x n) Gauss-Lobatto sample of every cell.
  double min_jacobian_determinant(int samples_per_direction = 4) const;

  bool is_cartesian(double tol = 1e-14) const;

private:
  std::array<int, 3> n_;
  std::array<int, 8> class_offset_{};
  int total_ = 0;
  std::vector<Point> coords_;
  std::array<int, 3> class_extent(int pinned) const;
};

/// Masks in global order: vertex, x/y/z edges, x/y/z-normal faces, cell.
inline constexpr std::array<int, 8> kEntityMasks{7, 6, 5, 3, 1, 2, 4, 0};

MeshComplex build_box_mesh(int nx, int ny, int nz, const Distortion& distortion = Distortion::none());

/// Splits every cell into eight; new vertices follow the trilinear map of the parent cell.
MeshComplex refine_uniform(const MeshComplex& mesh);

/// hexmesh v1 text format.
void write_mesh(std::ostream& out, const MeshComplex& mesh);
MeshComplex read_mesh(std::istream& in);
void write_mesh_file(const std::string& path, const MeshComplex& mesh);
MeshComplex read_mesh_file(const std::string& path);

}  // namespace fdm
