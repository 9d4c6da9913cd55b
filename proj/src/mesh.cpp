#include "fdm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fdm/errors.hpp"
#include "fdm/fdm1d.hpp"
#include "fdm/rng.hpp"

namespace fdm {

MeshComplex::MeshComplex(int nx, int ny, int nz) : n_{nx, ny, nz} {
  if (nx < 1 || ny < 1 || nz < 1) throw InvalidArgument("mesh extents must be >= 1");
  int offset = 0;
  for (int c = 0; c < 8; ++c) {
    class_offset_[c] = offset;
    offset += count(kEntityMasks[c]);
  }
  total_ = offset;
  coords_.resize(static_cast<std::size_t>(num_vertices()));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        coords_[vertex_id(i, j, k)] = Point(double(i) / nx, double(j) / ny, double(k) / nz);
}

std::array<int, 3> MeshComplex::class_extent(int pinned) const {
  std::array<int, 3> e{};
  for (int d = 0; d < 3; ++d) e[d] = (pinned >> d & 1) ? n_[d] + 1 : n_[d];
  return e;
}

int MeshComplex::count(int pinned) const {
  const auto e = class_extent(pinned);
  return e[0] * e[1] * e[2];
}

int MeshComplex::num_entities(int dim) const {
  int n = 0;
  for (int m : kEntityMasks)
    if (3 - __builtin_popcount(static_cast<unsigned>(m)) == dim) n += count(m);
  return n;
}

bool MeshComplex::valid(const Entity& e) const {
  if (e.pinned < 0 || e.pinned > 7) return false;
  const auto ext = class_extent(e.pinned);
  for (int d = 0; d < 3; ++d)
    if (e.index[d] < 0 || e.index[d] >= ext[d]) return false;
  return true;
}

int MeshComplex::id(const Entity& e) const {
  if (!valid(e)) throw InvalidArgument("unknown mesh entity");
  const int cls = static_cast<int>(std::find(kEntityMasks.begin(), kEntityMasks.end(), e.pinned) - kEntityMasks.begin());
  const auto ext = class_extent(e.pinned);
  return class_offset_[cls] + e.index[0] + ext[0] * (e.index[1] + ext[1] * e.index[2]);
}

Entity MeshComplex::entity(int id) const {
  if (id < 0 || id >= total_) throw InvalidArgument("unknown mesh entity id");
  int cls = 7;
  while (class_offset_[cls] > id) --cls;
  Entity e;
  e.pinned = kEntityMasks[cls];
  const auto ext = class_extent(e.pinned);
  int r = id - class_offset_[cls];
  e.index[0] = r % ext[0];
  r /= ext[0];
  e.index[1] = r % ext[1];
  e.index[2] = r / ext[1];
  return e;
}

std::vector<Entity> MeshComplex::boundary(const Entity& e) const {
  if (!valid(e)) throw InvalidArgument("unknown mesh entity");
  std::vector<Entity> out;
  for (int d = 0; d < 3; ++d) {
    if (e.pinned >> d & 1) continue;
    for (int s = 0; s < 2; ++s) {
      Entity f = e;
      f.pinned |= 1 << d;
      f.index[d] += s;
      out.push_back(f);
    }
  }
  return out;
}

std::vector<Entity> MeshComplex::closure(const Entity& e) const {
  if (!valid(e)) throw InvalidArgument("unknown mesh entity");
  std::vector<Entity> out;
  const int free = 7 & ~e.pinned;
  // Every subset of the free directions can be pinned at either end.
  for (int sub = 0; sub < 8; ++sub) {
    if ((sub & free) != sub) continue;
    for (int ends = 0; ends < 8; ++ends) {
      if ((ends & sub) != ends) continue;
      Entity f = e;
      f.pinned |= sub;
      for (int d = 0; d < 3; ++d)
        if (ends >> d & 1) f.index[d] += 1;
      out.push_back(f);
    }
  }
  return out;
}

std::vector<Entity> MeshComplex::star(const Entity& e) const {
  if (!valid(e)) throw InvalidArgument("unknown mesh entity");
  std::vector<Entity> out;
  // f contains e iff f's pinned directions are pinned in e at the same index and, in directions
  // pinned in e but free in f, f's interval touches e's coordinate.
  for (int sub = 0; sub < 8; ++sub) {
    if ((sub & e.pinned) != sub) continue;
    const int released = e.pinned & ~sub;
    for (int shift = 0; shift < 8; ++shift) {
      if ((shift & released) != shift) continue;
      Entity f = e;
      f.pinned = sub;
      for (int d = 0; d < 3; ++d)
        if (shift >> d & 1) f.index[d] -= 1;
      if (valid(f)) out.push_back(f);
    }
  }
  std::sort(out.begin(), out.end(), [this](const Entity& a, const Entity& b) { return id(a) < id(b); });
  return out;
}

std::vector<int> MeshComplex::star_cells(const Entity& e) const {
  std::vector<int> cells;
  for (const auto& f : star(e))
    if (f.pinned == 0) cells.push_back(cell_id(f.index[0], f.index[1], f.index[2]));
  std::sort(cells.begin(), cells.end());
  return cells;
}

bool MeshComplex::on_boundary(const Entity& e) const {
  for (int d = 0; d < 3; ++d)
    if ((e.pinned >> d & 1) && (e.index[d] == 0 || e.index[d] == n_[d])) return true;
  return false;
}

std::array<int, 3> MeshComplex::cell_index(int c) const {
  return {c % n_[0], (c / n_[0]) % n_[1], c / (n_[0] * n_[1])};
}

std::array<Point, 8> MeshComplex::cell_corners(int c) const {
  const auto [i, j, k] = cell_index(c);
  std::array<Point, 8> x;
  for (int q = 0; q < 8; ++q) x[q] = coords_[vertex_id(i + (q & 1), j + (q >> 1 & 1), k + (q >> 2 & 1))];
  return x;
}

Point MeshComplex::map(int c, const Point& xi) const {
  const auto x = cell_corners(c);
  Point out = Point::Zero();
  for (int q = 0; q < 8; ++q) {
    double w = 1.0;
    for (int d = 0; d < 3; ++d) w *= (q >> d & 1) ? 0.5 * (1 + xi[d]) : 0.5 * (1 - xi[d]);
    out += w * x[q];
  }
  return out;
}

Eigen::Matrix3d MeshComplex::jacobian(int c, const Point& xi) const {
  const auto x = cell_corners(c);
  Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
  for (int q = 0; q < 8; ++q) {
    double f[3], df[3];
    for (int d = 0; d < 3; ++d) {
      const bool hi = q >> d & 1;
      f[d] = hi ? 0.5 * (1 + xi[d]) : 0.5 * (1 - xi[d]);
      df[d] = hi ? 0.5 : -0.5;
    }
    jac.col(0) += df[0] * f[1] * f[2] * x[q];
    jac.col(1) += f[0] * df[1] * f[2] * x[q];
    jac.col(2) += f[0] * f[1] * df[2] * x[q];
  }
  return jac;
}

double MeshComplex::min_jacobian_determinant(int samples) const {
  const auto pts = gauss_lobatto_rule(std::max(samples, 2)).points;
  double worst = INFINITY;
  for (int c = 0; c < num_cells(); ++c)
    for (double z : pts)
      for (double y : pts)
        for (double x : pts) worst = std::min(worst, jacobian(c, Point(x, y, z)).determinant());
  return worst;
}

bool MeshComplex::is_cartesian(double tol) const {
  for (int k = 0; k <= n_[2]; ++k)
    for (int j = 0; j <= n_[1]; ++j)
      for (int i = 0; i <= n_[0]; ++i) {
        const Point& x = coords_[vertex_id(i, j, k)];
        if (std::abs(x[0] - coords_[vertex_id(i, 0, 0)][0]) > tol ||
            std::abs(x[1] - coords_[vertex_id(0, j, 0)][1]) > tol ||
            std::abs(x[2] - coords_[vertex_id(0, 0, k)][2]) > tol)
          return false;
      }
  return true;
}

MeshComplex build_box_mesh(int nx, int ny, int nz, const Distortion& distortion) {
  MeshComplex mesh(nx, ny, nz);
  const double a = distortion.amplitude;
  if (distortion.kind != Distortion::Kind::none) {
    const int nmax = std::max({nx, ny, nz});
    if (!(a >= 0.0) || a >= 0.5 / nmax)
      throw InvalidArgument("distortion amplitude must be in [0, 0.5/max(nx,ny,nz))");
  }
  auto& x = mesh.coordinates();
  const double pi = std::numbers::pi;
  const CounterRng rng(distortion.seed, 0x6a17);
  for (int k = 1; k < nz; ++k)
    for (int j = 1; j < ny; ++j)
      for (int i = 1; i < nx; ++i) {
        const int v = mesh.vertex_id(i, j, k);
        const Point p = x[v];
        if (distortion.kind == Distortion::Kind::smooth) {
          const double bump = std::sin(pi * p[0]) * std::sin(pi * p[1]) * std::sin(pi * p[2]);
          for (int d = 0; d < 3; ++d) x[v][d] += a * bump * std::cos(2.0 * pi * p[d] + 2.0 * pi * d / 3.0);
        } else if (distortion.kind == Distortion::Kind::jitter) {
          for (int d = 0; d < 3; ++d) x[v][d] += rng.uniform(3 * static_cast<std::uint64_t>(v) + d, -a, a);
        }
      }
  if (mesh.min_jacobian_determinant() <= 0.0)
    throw InvalidArgument("distortion produced a nonpositive Jacobian determinant");
  return mesh;
}

MeshComplex refine_uniform(const MeshComplex& mesh) {
  const auto n = mesh.extents();
  MeshComplex fine(2 * n[0], 2 * n[1], 2 * n[2]);
  auto& x = fine.coordinates();
  for (int k = 0; k <= 2 * n[2]; ++k)
    for (int j = 0; j <= 2 * n[1]; ++j)
      for (int i = 0; i <= 2 * n[0]; ++i) {
        const int I[3] = {i, j, k};
        int c[3];
        Point xi;
        for (int d = 0; d < 3; ++d) {
          c[d] = std::min(I[d] / 2, n[d] - 1);
          xi[d] = static_cast<double>(I[d] - 2 * c[d]) - 1.0;
        }
        x[fine.vertex_id(i, j, k)] = mesh.map(mesh.cell_id(c[0], c[1], c[2]), xi);
      }
  return fine;
}

void write_mesh(std::ostream& out, const MeshComplex& mesh) {
  out << "hexmesh v1 " << mesh.extent(0) << " " << mesh.extent(1) << " " << mesh.extent(2) << "\n";
  out << std::setprecision(17);
  for (const auto& p : mesh.coordinates()) out << p[0] << " " << p[1] << " " << p[2] << "\n";
}

MeshComplex read_mesh(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("missing hexmesh header", lineno + 1);
  std::istringstream header(line);
  std::string magic, version;
  int nx = 0, ny = 0, nz = 0;
  if (!(header >> magic >> version >> nx >> ny >> nz) || magic != "hexmesh" || version != "v1")
    throw ParseError("expected 'hexmesh v1 nx ny nz'", lineno);
  std::string rest;
  if (header >> rest) throw ParseError("trailing tokens in header", lineno);
  if (nx < 1 || ny < 1 || nz < 1) throw ParseError("mesh extents must be positive", lineno);
  MeshComplex mesh(nx, ny, nz);
  for (auto& p : mesh.coordinates()) {
    if (!next_line()) throw ParseError("unexpected end of file: too few vertex lines", lineno + 1);
    std::istringstream row(line);
    if (!(row >> p[0] >> p[1] >> p[2])) throw ParseError("expected three coordinates", lineno);
    if (row >> rest) throw ParseError("trailing tokens after coordinates", lineno);
  }
  if (next_line()) throw ParseError("too many vertex lines", lineno);
  if (mesh.min_jacobian_determinant() <= 0.0) throw InvalidData("mesh has a nonpositive Jacobian determinant");
  return mesh;
}

void write_mesh_file(const std::string& path, const MeshComplex& mesh) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  write_mesh(out, mesh);
}

MeshComplex read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return read_mesh(in);
}

}  // namespace fdm
