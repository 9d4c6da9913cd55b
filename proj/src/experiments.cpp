#include "fdm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fdm/cholesky.hpp"
#include "fdm/errors.hpp"
#include "fdm/ordering.hpp"

namespace fdm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw InvalidArgument("config: '" + key + "' expects a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw InvalidArgument("config: '" + key + "' expects an integer, got '" + v + "'");
  return static_cast<int>(x);
}

std::string format_double(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

bool is_unit(const CoefficientField& f) { return f.kind == CoefficientField::Kind::constant && f.value == 1.0; }

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", number);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", number);
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    throw InvalidArgument("override '" + assignment + "' is not key=value");
  values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? to_int(key, get(key, "")) : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? to_double(key, get(key, "")) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key, "");
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw InvalidArgument("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<int> Config::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (const auto& item : split(get(key, ""), ',')) out.push_back(to_int(key, item));
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : split(get(key, ""), ',')) out.push_back(to_double(key, item));
  return out;
}

std::string MeshSpec::label() const {
  std::ostringstream s;
  if (!file.empty()) {
    s << "file";
  } else {
    s << nx << 'x' << ny << 'x' << nz;
  }
  s << "-l" << refine;
  switch (distortion.kind) {
    case Distortion::Kind::none: s << "-cartesian"; break;
    case Distortion::Kind::smooth: s << "-distorted-smooth-" << distortion.amplitude; break;
    case Distortion::Kind::jitter: s << "-distorted-jitter-" << distortion.amplitude; break;
  }
  return s.str();
}

MeshComplex make_mesh(const MeshSpec& spec) {
  if (spec.refine < 0) throw InvalidArgument("refinement level must be nonnegative");
  MeshComplex mesh = spec.file.empty() ? build_box_mesh(spec.nx, spec.ny, spec.nz, spec.distortion)
                                       : read_mesh_file(spec.file);
  for (int l = 0; l < spec.refine; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

CoefficientField parse_coefficient(const std::string& spec, const MeshComplex& mesh) {
  if (spec.rfind("jump:", 0) == 0) {
    const auto parts = split(spec.substr(5), ':');
    if (parts.size() != 2) throw InvalidArgument("coefficient '" + spec + "': expected jump:left:right");
    const double left = to_double("coefficient", parts[0]), right = to_double("coefficient", parts[1]);
    if (!(left > 0.0 && right > 0.0)) throw InvalidArgument("coefficient '" + spec + "' must be positive");
    std::vector<double> v(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) v[c] = mesh.map(c, Point::Zero()).x() < 0.5 ? left : right;
    return CoefficientField::cellwise(std::move(v));
  }
  if (spec == "analytic:smooth") {
    return CoefficientField::analytic([](const Point& x) {
      const double pi = std::numbers::pi;
      return 1.0 + 0.5 * std::sin(2 * pi * x.x()) * std::sin(2 * pi * x.y()) * std::sin(2 * pi * x.z());
    });
  }
  const double v = to_double("coefficient", spec);
  if (!(v >= 0.0)) throw InvalidArgument("coefficient '" + spec + "' must be nonnegative");
  return CoefficientField::constant(v);
}

RieszResult run_riesz(const RieszConfig& config) {
  if (config.k < 0 || config.k > 2) throw InvalidArgument("riesz: k must be 0, 1 or 2");
  if (config.p < 1) throw InvalidArgument("riesz: p must be at least 1");
  const MeshComplex mesh = make_mesh(config.mesh);
  const FdmBasis1D basis = build_fdm_basis(config.p);
  const DofMap dm = build_dofmap(mesh, config.k, config.p, config.dirichlet);
  const CoefficientField alpha = parse_coefficient(config.alpha, mesh);
  const CoefficientField beta = parse_coefficient(config.beta, mesh);
  const RieszOperator op(mesh, dm, basis, alpha, beta);

  RieszResult result;
  result.config = config;
  result.num_dofs = op.size();

  Vector w;
  const Vector f = assemble_rhs(mesh, dm, basis, config.seed, &w);
  PreconditionerOptions popt = config.preconditioner;
  popt.seed = config.seed;
  const TwoLevelPreconditioner pc(op, popt);
  result.setup = pc.setup();

  op.reset_flops();
  SolveResult sol = pcg([&](const Vector& x) { return op.apply(x); }, pc.as_map(), f, config.krylov);
  result.report = sol.report;

  const Vector probe = random_coefficients(op.size(), config.seed + 1);
  op.reset_flops();
  op.apply(probe);
  result.operator_flops = op.flops();
  result.preconditioner_flops = pc.flops_per_apply();
  result.report.flops = result.report.flops + static_cast<std::uint64_t>(result.report.iterations + 1) *
                                                  (result.operator_flops + result.preconditioner_flops);
  if (is_unit(alpha) && is_unit(beta) && w.norm() > 0.0) result.solution_error = (sol.x - w).norm() / w.norm();
  return result;
}

std::vector<SweepRow> run_sweep(const RieszConfig& base, const std::vector<double>& alphas,
                                const std::vector<double>& betas) {
  std::vector<SweepRow> rows;
  for (double a : alphas)
    for (double b : betas) {
      RieszConfig c = base;
      c.alpha = format_double(a);
      c.beta = format_double(b);
      const RieszResult r = run_riesz(c);
      rows.push_back({a, b, r.report.iterations, r.report.converged});
    }
  return rows;
}

HodgeSystem::HodgeSystem(const MeshComplex& mesh, int k, int p)
    : mesh_(&mesh), k_(k), p_(p), basis_(build_fdm_basis(p)) {
  if (k < 1 || k > 3) throw InvalidArgument("hodge: k must be 1, 2 or 3");
  dm_s_ = build_dofmap(mesh, k - 1, p, Dirichlet::none);
  dm_u_ = build_dofmap(mesh, k, p, Dirichlet::none);
  ns_ = dm_s_.num_free;
  nu_ = dm_u_.num_free;
  const auto one = CoefficientField::constant(1.0), zero = CoefficientField::constant(0.0);
  mass_s_ = std::make_unique<RieszOperator>(mesh, dm_s_, basis_, zero, one);
  mass_u_ = std::make_unique<RieszOperator>(mesh, dm_u_, basis_, zero, one);
  if (k < 3) stiff_u_ = std::make_unique<RieszOperator>(mesh, dm_u_, basis_, one, zero);
  riesz_s_ = std::make_unique<RieszOperator>(mesh, dm_s_, basis_, one, one);
  {
    // Coupling block M_k D assembled once, so that the (1,2) block is its exact transpose.
    CellAssembler mass(nu_, nu_);
    std::vector<CsrMatrix> local(mesh.num_cells());
    std::vector<std::vector<int>> maps(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
      local[c] = CsrMatrix::from_dense(mass_u_->cell_matrix(c));
      maps[c].resize(dm_u_.local_size());
      for (int q = 0; q < dm_u_.local_size(); ++q) maps[c][q] = dm_u_.cell_free(c, q);
      mass.add_pattern(maps[c], maps[c], local[c]);
    }
    mass.finalize_pattern();
    for (int c = 0; c < mesh.num_cells(); ++c) mass.add_values(maps[c], maps[c], local[c], CellAssembler::Mode::add);
    b_ = multiply(mass.take(), assemble_transfer(mesh, dm_s_, dm_u_, basis_));
    b_t_ = b_.transpose();
  }

  PreconditionerOptions popt;
  popt.decomposition = k == 1 ? Decomposition::sc_pafw : Decomposition::sc_ph;
  pc_s_ = std::make_unique<TwoLevelPreconditioner>(*riesz_s_, popt);
  if (k < 3) {
    riesz_u_ = std::make_unique<RieszOperator>(mesh, dm_u_, basis_, one, one);
    popt.decomposition = Decomposition::sc_ph;
    pc_u_ = std::make_unique<TwoLevelPreconditioner>(*riesz_u_, popt);
  } else {
    jacobi_ = Vector::Zero(nu_);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const Matrix m = mass_u_->cell_matrix(c);
      for (int q = 0; q < dm_u_.local_size(); ++q) {
        const int i = dm_u_.cell_free(c, q);
        if (i >= 0) jacobi_[i] += m(q, q);
      }
    }
  }
}

Vector HodgeSystem::apply_lower(const Vector& sigma) const {
  Vector out(nu_);
  b_.multiply(std::span<const double>(sigma.data(), ns_), std::span<double>(out.data(), nu_));
  coupling_flops_ += 2 * static_cast<std::uint64_t>(b_.nnz());
  return out;
}

Vector HodgeSystem::apply_upper(const Vector& u) const {
  Vector out(ns_);
  b_t_.multiply(std::span<const double>(u.data(), nu_), std::span<double>(out.data(), ns_));
  coupling_flops_ += 2 * static_cast<std::uint64_t>(b_.nnz());
  return out;
}

Vector HodgeSystem::apply(const Vector& x) const {
  const Vector sigma = x.head(ns_), u = x.tail(nu_);
  Vector y(size());
  y.head(ns_) = apply_upper(u) - mass_s_->apply(sigma);
  Vector lower = apply_lower(sigma);
  if (stiff_u_) lower += stiff_u_->apply(u);
  y.tail(nu_) = lower;
  return y;
}

Vector HodgeSystem::rhs(std::uint64_t seed) const {
  Vector b = Vector::Zero(size());
  b.tail(nu_) = assemble_rhs(*mesh_, dm_u_, basis_, seed);
  return b;
}

LinearMap HodgeSystem::preconditioner(int chebyshev_steps, int lanczos_steps, std::uint64_t seed) const {
  const LinearMap as = [this](const Vector& x) { return riesz_s_->apply(x); };
  const LinearMap ps = pc_s_->as_map();
  const auto [ls, hs] = lanczos_bounds(as, ps, ns_, lanczos_steps, seed);
  const LinearMap block_s = chebyshev(as, ps, ls, hs, chebyshev_steps);

  LinearMap au, pu;
  if (pc_u_) {
    au = [this](const Vector& x) { return riesz_u_->apply(x); };
    pu = pc_u_->as_map();
  } else {
    au = [this](const Vector& x) { return mass_u_->apply(x); };
    const Vector inv = jacobi_.cwiseInverse();
    pu = [inv](const Vector& r) { return Vector(inv.cwiseProduct(r)); };
  }
  const auto [lu, hu] = lanczos_bounds(au, pu, nu_, lanczos_steps, seed + 1);
  const LinearMap block_u = chebyshev(au, pu, lu, hu, chebyshev_steps);

  const int ns = ns_, nu = nu_;
  return [block_s, block_u, ns, nu](const Vector& r) {
    Vector z(ns + nu);
    z.head(ns) = block_s(r.head(ns));
    z.tail(nu) = block_u(r.tail(nu));
    return z;
  };
}

std::uint64_t HodgeSystem::flops() const {
  std::uint64_t f = coupling_flops_ + mass_s_->flops() + mass_u_->flops() + riesz_s_->flops() + pc_s_->flops();
  if (stiff_u_) f += stiff_u_->flops();
  if (riesz_u_) f += riesz_u_->flops();
  if (pc_u_) f += pc_u_->flops();
  return f;
}

HodgeResult run_hodge(const HodgeConfig& config) {
  if (config.chebyshev_steps < 1) throw InvalidArgument("hodge: chebyshev_steps must be positive");
  const MeshComplex mesh = make_mesh(config.mesh);
  const HodgeSystem sys(mesh, config.k, config.p);
  const Vector b = sys.rhs(config.seed);
  const LinearMap pinv = sys.preconditioner(config.chebyshev_steps, config.lanczos_steps, config.seed);
  const SolveResult sol = minres([&](const Vector& x) { return sys.apply(x); }, pinv, b, config.krylov);
  HodgeResult r;
  r.config = config;
  r.sigma_dofs = sys.sigma_size();
  r.u_dofs = sys.u_size();
  r.report = sol.report;
  r.report.flops += sys.flops();
  r.residual = (b - sys.apply(sol.x)).norm() / b.norm();
  return r;
}

CsrMatrix gll_patch_pattern(const MeshComplex& mesh, const DofMap& dofmap, const std::vector<int>& patch) {
  std::vector<int> local(dofmap.num_free, -1);
  for (std::size_t a = 0; a < patch.size(); ++a) local[patch[a]] = static_cast<int>(a);
  std::vector<Triplet> t;
  std::vector<int> in_cell;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    in_cell.clear();
    for (int q = 0; q < dofmap.local_size(); ++q) {
      const int i = dofmap.cell_free(c, q);
      if (i >= 0 && local[i] >= 0) in_cell.push_back(local[i]);
    }
    for (int a : in_cell)
      for (int b : in_cell) t.push_back({a, b, 1.0});
  }
  const int n = static_cast<int>(patch.size());
  CsrMatrix m = CsrMatrix::from_triplets(n, n, std::move(t));
  std::fill(m.values.begin(), m.values.end(), 1.0);
  m.symmetric = true;
  return m;
}

ComplexityRow run_complexity(int k, int p, const MeshSpec& spec) {
  if (k < 0 || k > 2) throw InvalidArgument("complexity: k must be 0, 1 or 2");
  const MeshComplex mesh = make_mesh(spec);
  const FdmBasis1D basis = build_fdm_basis(p);
  const DofMap dm = build_dofmap(mesh, k, p, Dirichlet::all);
  const auto one = CoefficientField::constant(1.0);
  const RieszOperator op(mesh, dm, basis, one, one);
  const CsrMatrix aux = assemble_auxiliary(op);

  ComplexityRow row;
  row.k = k;
  row.p = p;
  row.num_dofs = op.size();
  row.aux_nnz = aux.nnz();

  const PatchSet stars = entity_star_patches(mesh, dm, 0, false);
  const std::vector<char> interior = dm.cell_interior_mask();
  for (const auto& patch : stars.patches) {
    const CsrMatrix sub = aux.submatrix(patch);
    std::vector<char> sub_interior(patch.size());
    std::vector<int> sub_groups(patch.size());
    for (std::size_t a = 0; a < patch.size(); ++a) {
      sub_interior[a] = interior[patch[a]];
      sub_groups[a] = dm.interior_group[patch[a]];
    }
    const ScPattern scp = sc_pattern(sub, sub_interior, sub_groups);
    row.icc_nnz += icc_imposed(sub, scp.pattern, scp.perm).nnz();
    row.chol_nnz += cholesky_nnz(sub, amd_ordering(sub));
    const CsrMatrix gll = gll_patch_pattern(mesh, dm, patch);
    // AMD treats every row of a dense-cell pattern as dense once p is large; eliminating by owner
    // dimension (cell interiors first) is the better ordering there.
    std::vector<int> by_owner(patch.size());
    std::iota(by_owner.begin(), by_owner.end(), 0);
    std::stable_sort(by_owner.begin(), by_owner.end(),
                     [&](int a, int b) { return dm.owner_dim[patch[a]] > dm.owner_dim[patch[b]]; });
    row.gll_nnz += std::min(cholesky_nnz(gll, amd_ordering(gll)), cholesky_nnz(gll, by_owner));
  }

  PreconditionerOptions popt;
  popt.decomposition = Decomposition::pafw;
  popt.factorization = k == 0 ? Factorization::icc_sc : Factorization::chol;
  const TwoLevelPreconditioner pc(op, popt);
  row.cycle_flops = pc.flops_per_apply();
  op.reset_flops();
  op.apply(random_coefficients(op.size(), 7));
  row.operator_flops = op.flops();
  row.bytes = pc.setup().bytes + aux.bytes();
  return row;
}

double fitted_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fitted_exponent: need two or more samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_riesz_csv_header(std::ostream& out) {
  out << "# fdmsolve riesz csv v1\n"
      << "k,p,mesh,dirichlet,decomposition,factorization,alpha,beta,dofs,iterations,converged,aux_nnz,"
         "schur_nnz,factor_nnz,coarse_nnz,max_shift,omega,operator_flops,preconditioner_flops,total_flops,"
         "bytes,setup_s,solve_s,solution_error\n";
}

void write_riesz_csv(std::ostream& out, const RieszResult& r) {
  const auto& c = r.config;
  out << c.k << ',' << c.p << ',' << c.mesh.label() << ',' << (c.dirichlet == Dirichlet::all ? "all" : "none")
      << ',' << to_string(c.preconditioner.decomposition) << ',' << to_string(c.preconditioner.factorization)
      << ',' << c.alpha << ',' << c.beta << ',' << r.num_dofs << ',' << r.report.iterations << ','
      << (r.report.converged ? 1 : 0) << ',' << r.setup.aux_nnz << ',' << r.setup.schur_nnz << ','
      << r.setup.factor_nnz << ',' << r.setup.coarse_nnz << ',' << r.setup.max_shift << ',' << r.setup.omega
      << ',' << r.operator_flops << ',' << r.preconditioner_flops << ',' << r.report.flops << ','
      << r.setup.bytes << ',' << r.setup.seconds << ',' << r.report.seconds << ',' << r.solution_error << '\n';
}

MeshSpec mesh_spec_from(const Config& c) {
  MeshSpec m;
  m.nx = c.get_int("nx", 2);
  m.ny = c.get_int("ny", m.nx);
  m.nz = c.get_int("nz", m.nx);
  m.refine = c.get_int("l", 0);
  m.file = c.get("mesh_file", "");
  const std::string kind = c.get("distort", "none");
  const double amp = c.get_double("amplitude", 0.1);
  const auto seed = static_cast<std::uint64_t>(c.get_int("mesh_seed", c.get_int("seed", 0)));
  if (kind == "none") {
    m.distortion = Distortion::none();
  } else if (kind == "smooth") {
    m.distortion = Distortion::smooth(amp);
  } else if (kind == "jitter") {
    m.distortion = Distortion::jitter(amp, seed);
  } else {
    throw InvalidArgument("config: unknown distortion '" + kind + "'");
  }
  if (m.nx < 1 || m.ny < 1 || m.nz < 1) throw InvalidArgument("config: mesh extents must be positive");
  if (m.refine < 0) throw InvalidArgument("config: l must be nonnegative");
  return m;
}

RieszConfig riesz_config_from(const Config& c) {
  RieszConfig r;
  r.k = c.get_int("k", r.k);
  r.p = c.get_int("p", r.p);
  r.mesh = mesh_spec_from(c);
  const std::string dir = c.get("dirichlet", "all");
  if (dir == "all") {
    r.dirichlet = Dirichlet::all;
  } else if (dir == "none") {
    r.dirichlet = Dirichlet::none;
  } else {
    throw InvalidArgument("config: dirichlet must be all or none");
  }
  r.alpha = c.get("alpha", r.alpha);
  r.beta = c.get("beta", r.beta);
  auto& pc = r.preconditioner;
  pc.decomposition = parse_decomposition(c.get("decomposition", to_string(pc.decomposition)));
  if (c.has("sc")) {
    const bool sc = c.get_bool("sc", false);
    const bool hip = pc.decomposition == Decomposition::ph || pc.decomposition == Decomposition::sc_ph;
    pc.decomposition = hip ? (sc ? Decomposition::sc_ph : Decomposition::ph)
                           : (sc ? Decomposition::sc_pafw : Decomposition::pafw);
  }
  if (c.get("coarse", "direct") != "direct") throw InvalidArgument("config: coarse must be direct");
  pc.factorization = parse_factorization(c.get("factorization", to_string(pc.factorization)));
  pc.vertex_ordering = parse_ordering(c.get("ordering", to_string(pc.vertex_ordering)));
  pc.omega = c.get_double("omega", pc.omega);
  pc.lanczos_steps = c.get_int("lanczos_steps", pc.lanczos_steps);
  r.krylov.rtol = c.get_double("rtol", r.krylov.rtol);
  r.krylov.maxit = c.get_int("maxit", r.krylov.maxit);
  r.seed = static_cast<std::uint64_t>(c.get_int("seed", 0));

  if (r.k < 0 || r.k > 2) throw InvalidArgument("config: k must be 0, 1 or 2 for Riesz problems");
  if (r.p < 1 || r.p > 15) throw InvalidArgument("config: p must lie in 1..15");
  if (!(r.krylov.rtol > 0.0)) throw InvalidArgument("config: rtol must be positive");
  if (r.krylov.maxit < 1) throw InvalidArgument("config: maxit must be positive");
  if (pc.omega < 0.0) throw InvalidArgument("config: omega must be nonnegative");
  if (pc.lanczos_steps < 2) throw InvalidArgument("config: lanczos_steps must be at least 2");
  return r;
}

HodgeConfig hodge_config_from(const Config& c) {
  HodgeConfig h;
  h.k = c.get_int("k", h.k);
  h.p = c.get_int("p", h.p);
  h.mesh = mesh_spec_from(c);
  h.chebyshev_steps = c.get_int("chebyshev_steps", h.chebyshev_steps);
  h.lanczos_steps = c.get_int("lanczos_steps", h.lanczos_steps);
  h.krylov.rtol = c.get_double("rtol", h.krylov.rtol);
  h.krylov.maxit = c.get_int("maxit", h.krylov.maxit);
  h.seed = static_cast<std::uint64_t>(c.get_int("seed", 0));
  if (h.k < 1 || h.k > 3) throw InvalidArgument("config: k must be 1, 2 or 3 for Hodge problems");
  if (h.p < 1 || h.p > 15) throw InvalidArgument("config: p must lie in 1..15");
  if (c.get("dirichlet", "none") != "none") throw InvalidArgument("config: Hodge problems use dirichlet = none");
  if (h.chebyshev_steps < 1) throw InvalidArgument("config: chebyshev_steps must be positive");
  if (!(h.krylov.rtol > 0.0) || h.krylov.maxit < 1) throw InvalidArgument("config: invalid Krylov settings");
  return h;
}

}  // namespace fdm
