// fdmsolve: Riesz-map and Hodge-Laplacian experiments on structured hexahedral meshes.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdm/cholesky.hpp"
#include "fdm/decompositions.hpp"
#include "fdm/errors.hpp"
#include "fdm/experiments.hpp"
#include "fdm/ordering.hpp"

namespace {

using namespace fdm;

constexpr int kExitNonConvergence = 2;
constexpr int kExitInvalidConfig = 3;
constexpr int kExitNumericalFailure = 4;

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> flags;
  std::string out;
  bool markdown = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::vector<std::pair<std::string, std::string>>& keys) {
  cmd->add_option("-c,--config", o.config_file, "key=value configuration file");
  cmd->add_option("-s,--set", o.overrides, "override, key=value (repeatable)");
  cmd->add_option("-o,--out", o.out, "output file or directory (default: stdout)");
  for (const auto& [key, help] : keys) {
    std::string flag = "--" + key;
    for (char& ch : flag)
      if (ch == '_') ch = '-';
    cmd->add_option(flag, o.flags[key], help);
  }
}

const std::vector<std::pair<std::string, std::string>> kMeshKeys = {
    {"nx", "cells in x (default 2)"},
    {"ny", "cells in y (default nx)"},
    {"nz", "cells in z (default nx)"},
    {"l", "uniform refinement levels (default 0)"},
    {"distort", "none, smooth or jitter"},
    {"amplitude", "distortion amplitude (default 0.1)"},
    {"mesh_file", "hexmesh v1 file; replaces the box"},
    {"seed", "global seed (also FDM_SEED)"},
};

std::vector<std::pair<std::string, std::string>> with_mesh(std::vector<std::pair<std::string, std::string>> keys) {
  keys.insert(keys.end(), kMeshKeys.begin(), kMeshKeys.end());
  return keys;
}

Config build_config(const CommonOptions& o) {
  Config c = o.config_file.empty() ? Config{} : Config::from_file(o.config_file);
  if (const char* env = std::getenv("FDM_SEED"); env && !c.has("seed")) c.set("seed", env);
  for (const auto& [key, value] : o.flags)
    if (!value.empty()) c.set(key, value);
  for (const auto& a : o.overrides) c.set(a);
  return c;
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidArgument("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
  std::ofstream file_;
};

void write_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
  out << "# " << name << ' ' << m.rows() << ' ' << m.cols() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
}

int cmd_basis(const CommonOptions& o, int p) {
  if (p < 1 || p > 30) throw InvalidArgument("basis: p must lie in 1..30");
  const FdmBasis1D b = build_fdm_basis(p);
  Output out(o.out);
  auto& s = out.stream();
  write_matrix(s, "S", b.S);
  Matrix lambda(static_cast<Eigen::Index>(b.eigenvalues.size()), 1);
  for (std::size_t i = 0; i < b.eigenvalues.size(); ++i) lambda(static_cast<Eigen::Index>(i), 0) = b.eigenvalues[i];
  write_matrix(s, "Lambda", lambda);
  write_matrix(s, "D", b.D);
  write_matrix(s, "B", b.mass());
  return 0;
}

void write_pattern_file(const std::filesystem::path& dir, const std::string& name, const CsrMatrix& a,
                        std::ostream& index) {
  std::ofstream f(dir / (name + ".txt"));
  if (!f) throw InvalidArgument("cannot write " + (dir / (name + ".txt")).string());
  f << "# " << a.rows << ' ' << a.cols << ' ' << a.nnz() << '\n' << to_coordinate_text(a);
  index << name << ',' << a.rows << ',' << a.nnz() << '\n';
}

CsrMatrix pattern_matrix(const SparsityPattern& s) {
  CsrMatrix m(s.n, s.n);
  m.row_ptr = s.row_ptr;
  m.col_idx = s.col_idx;
  m.values.assign(s.col_idx.size(), 1.0);
  return m;
}

CsrMatrix lower_factor_pattern(const CsrMatrix& a, std::span<const int> perm) {
  return pattern_matrix(symbolic_cholesky(a.permuted(perm)));
}

int cmd_spy(const CommonOptions& o) {
  const Config c = build_config(o);
  const RieszConfig rc = riesz_config_from(c);
  const MeshComplex mesh = make_mesh(rc.mesh);
  const FdmBasis1D basis = build_fdm_basis(rc.p);
  const DofMap dm = build_dofmap(mesh, rc.k, rc.p, rc.dirichlet);
  const RieszOperator op(mesh, dm, basis, parse_coefficient(rc.alpha, mesh), parse_coefficient(rc.beta, mesh));
  const CsrMatrix aux = assemble_auxiliary(op);
  const Decomposition dec = rc.preconditioner.decomposition;
  std::unique_ptr<DofMap> pot;
  if ((dec == Decomposition::ph || dec == Decomposition::sc_ph) && rc.k > 0)
    pot = std::make_unique<DofMap>(build_dofmap(mesh, rc.k - 1, rc.p, rc.dirichlet));
  const PatchCollection pc = build_patches(mesh, dm, dec, pot.get());

  std::unique_ptr<CondensedOperator> cond;
  std::vector<int> level_index(dm.num_free, -1);
  if (is_condensed(dec)) {
    const std::vector<char> interior = dm.cell_interior_mask();
    cond = std::make_unique<CondensedOperator>(aux, interior, dm.interior_group);
    for (int a = 0; a < cond->interface_size(); ++a) level_index[cond->interface_dofs()[a]] = a;
  } else {
    for (int i = 0; i < dm.num_free; ++i) level_index[i] = i;
  }
  const CsrMatrix& level = cond ? cond->schur() : aux;

  const std::filesystem::path dir = o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out);
  std::filesystem::create_directories(dir);
  std::cout << "# fdmsolve spy csv v1\nname,rows,nnz\n";
  const std::string kind = to_string(pc.primal.kind);
  if (pc.primal.patches.empty()) throw InvalidArgument("spy: the decomposition has no patches on this mesh");
  // The patch around the most central entity is the most representative one.
  std::size_t best = 0;
  for (std::size_t i = 0; i < pc.primal.patches.size(); ++i)
    if (pc.primal.patches[i].size() > pc.primal.patches[best].size()) best = i;
  const std::vector<int>& patch = pc.primal.patches[best];
  std::vector<int> rows;
  for (int i : patch) rows.push_back(level_index[i]);
  const CsrMatrix fdm_patch = level.submatrix(rows);
  write_pattern_file(dir, kind + "_fdm_matrix", fdm_patch, std::cout);
  const Ordering ord = pc.primal.kind == PatchKind::vertex_star ? rc.preconditioner.vertex_ordering : Ordering::rcm;
  write_pattern_file(dir, kind + "_fdm_factor", lower_factor_pattern(fdm_patch, compute_ordering(fdm_patch, ord)),
                     std::cout);
  write_pattern_file(dir, kind + "_fdm_matrix_" + to_string(ord), fdm_patch.permuted(compute_ordering(fdm_patch, ord)),
                     std::cout);

  const CsrMatrix gll = gll_patch_pattern(mesh, dm, patch);
  write_pattern_file(dir, kind + "_gll_matrix", gll, std::cout);
  write_pattern_file(dir, kind + "_gll_factor", lower_factor_pattern(gll, amd_ordering(gll)), std::cout);
  return 0;
}

void write_markdown_riesz(std::ostream& out, const std::vector<RieszResult>& rows) {
  out << "| k | p | mesh | decomposition | dofs | iterations | factor nnz | flops |\n"
      << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows)
    out << "| " << r.config.k << " | " << r.config.p << " | " << r.config.mesh.label() << " | "
        << to_string(r.config.preconditioner.decomposition) << " | " << r.num_dofs << " | " << r.report.iterations
        << (r.report.converged ? "" : " (nc)") << " | " << r.setup.factor_nnz << " | " << r.report.flops << " |\n";
}

int cmd_riesz(const CommonOptions& o) {
  const Config c = build_config(o);
  const std::vector<int> ps = c.get_int_list("p", {3});
  std::vector<RieszResult> rows;
  bool converged = true;
  for (int p : ps) {
    Config cp = c;
    cp.set("p", std::to_string(p));
    rows.push_back(run_riesz(riesz_config_from(cp)));
    converged = converged && rows.back().report.converged;
  }
  Output out(o.out);
  if (o.markdown) {
    write_markdown_riesz(out.stream(), rows);
  } else {
    write_riesz_csv_header(out.stream());
    for (const auto& r : rows) write_riesz_csv(out.stream(), r);
  }
  return converged ? 0 : kExitNonConvergence;
}

int cmd_sweep(const CommonOptions& o) {
  Config c = build_config(o);
  if (!c.has("k")) c.set("k", "1");
  if (!c.has("p")) c.set("p", "5");
  const RieszConfig base = riesz_config_from(c);
  if (base.k < 1 || base.k > 2) throw InvalidArgument("sweep: k must be 1 or 2");
  const auto alphas = c.get_double_list("alphas", {1e-3, 1.0, 1e3});
  const auto betas = c.get_double_list("betas", {1e-6, 1e-3, 1.0, 1e3, 1e6});
  const double scale = c.get_double("scale", 1e3);
  const std::vector<SweepRow> rows = run_sweep(base, alphas, betas);

  Output out(o.out);
  auto& s = out.stream();
  bool converged = true;
  int lo = 1 << 30, hi = 0;
  for (const auto& r : rows) {
    converged = converged && r.converged;
    lo = std::min(lo, r.iterations);
    hi = std::max(hi, r.iterations);
  }
  if (o.markdown) {
    s << "| alpha \\ beta |";
    for (double b : betas) s << ' ' << b << " |";
    s << "\n|---|";
    for (std::size_t j = 0; j < betas.size(); ++j) s << "---|";
    s << '\n';
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      s << "| " << alphas[i] << " |";
      for (std::size_t j = 0; j < betas.size(); ++j) s << ' ' << rows[i * betas.size() + j].iterations << " |";
      s << '\n';
    }
  } else {
    s << "# fdmsolve sweep csv v1\n# k=" << base.k << " p=" << base.p << " mesh=" << base.mesh.label()
      << " decomposition=" << to_string(base.preconditioner.decomposition) << '\n'
      << "alpha,beta,iterations,converged\n";
    for (const auto& r : rows) s << r.alpha << ',' << r.beta << ',' << r.iterations << ',' << r.converged << '\n';
  }

  // Scale pairs already on the grid, plus (1, 1) against (scale, scale).
  auto find = [&](double a, double b) -> const SweepRow* {
    for (const auto& r : rows)
      if (std::abs(r.alpha - a) <= 1e-12 * std::abs(a) && std::abs(r.beta - b) <= 1e-12 * std::abs(b)) return &r;
    return nullptr;
  };
  int pairs = 0, violations = 0;
  for (const auto& r : rows)
    if (const SweepRow* q = find(scale * r.alpha, scale * r.beta)) {
      ++pairs;
      violations += q->iterations != r.iterations;
    }
  std::ostream& notes = o.markdown ? std::cerr : s;
  notes << "# ratio max/min = " << static_cast<double>(hi) / std::max(lo, 1) << '\n'
        << "# scale invariance (c=" << scale << "): " << pairs << " pairs, " << violations << " violations\n";
  return converged ? 0 : kExitNonConvergence;
}

int cmd_hodge(const CommonOptions& o) {
  Config c = build_config(o);
  const std::vector<int> ps = c.get_int_list("p", {3});
  Output out(o.out);
  auto& s = out.stream();
  if (o.markdown) {
    s << "| k | p | mesh | sigma dofs | u dofs | MINRES iterations |\n|---|---|---|---|---|---|\n";
  } else {
    s << "# fdmsolve hodge csv v1\nk,p,mesh,sigma_dofs,u_dofs,iterations,converged,residual,flops,solve_s\n";
  }
  bool converged = true;
  for (int p : ps) {
    Config cp = c;
    cp.set("p", std::to_string(p));
    const HodgeResult r = run_hodge(hodge_config_from(cp));
    converged = converged && r.report.converged;
    if (o.markdown) {
      s << "| " << r.config.k << " | " << p << " | " << r.config.mesh.label() << " | " << r.sigma_dofs << " | "
        << r.u_dofs << " | " << r.report.iterations << " |\n";
    } else {
      s << r.config.k << ',' << p << ',' << r.config.mesh.label() << ',' << r.sigma_dofs << ',' << r.u_dofs << ','
        << r.report.iterations << ',' << r.report.converged << ',' << r.residual << ',' << r.report.flops << ','
        << r.report.seconds << '\n';
    }
  }
  return converged ? 0 : kExitNonConvergence;
}

int cmd_complexity(const CommonOptions& o) {
  const Config c = build_config(o);
  const int k = c.get_int("k", 0);
  const std::vector<int> ps = c.get_int_list("p", {4, 6, 8, 10});
  const MeshSpec mesh = mesh_spec_from(c);
  Output out(o.out);
  auto& s = out.stream();
  s << "# fdmsolve complexity csv v1\n"
    << "k,p,dofs,aux_nnz,icc_sc_nnz,chol_nnz,gll_chol_nnz,cycle_flops,operator_flops,bytes\n";
  std::vector<double> px, icc, gll, flops;
  for (int p : ps) {
    const ComplexityRow r = run_complexity(k, p, mesh);
    s << r.k << ',' << r.p << ',' << r.num_dofs << ',' << r.aux_nnz << ',' << r.icc_nnz << ',' << r.chol_nnz << ','
      << r.gll_nnz << ',' << r.cycle_flops << ',' << r.operator_flops << ',' << r.bytes << '\n';
    px.push_back(p);
    icc.push_back(static_cast<double>(r.icc_nnz));
    gll.push_back(static_cast<double>(r.gll_nnz));
    flops.push_back(static_cast<double>(r.cycle_flops + r.operator_flops));
  }
  if (px.size() >= 2)
    s << "# exponents: icc_sc_nnz " << fitted_exponent(px, icc) << ", gll_chol_nnz " << fitted_exponent(px, gll)
      << ", cycle+operator flops " << fitted_exponent(px, flops) << '\n';
  return 0;
}

int cmd_mesh(const CommonOptions& o, bool info) {
  const Config c = build_config(o);
  const MeshComplex mesh = make_mesh(mesh_spec_from(c));
  if (info) {
    Output out(o.out);
    out.stream() << "cells " << mesh.num_cells() << "\nvertices " << mesh.num_vertices() << "\nextents "
                 << mesh.extent(0) << ' ' << mesh.extent(1) << ' ' << mesh.extent(2) << "\nmin_jacobian "
                 << mesh.min_jacobian_determinant() << "\ncartesian " << (mesh.is_cartesian() ? 1 : 0) << '\n';
    return 0;
  }
  if (o.out.empty()) {
    write_mesh(std::cout, mesh);
  } else {
    write_mesh_file(o.out, mesh);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order Riesz-map and Hodge-Laplacian solvers with FDM bases and auxiliary-space preconditioners"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> solver_keys = {
      {"k", "form degree"},
      {"p", "polynomial degree, or a comma-separated list"},
      {"alpha", "alpha: constant, jump:left:right, or analytic:smooth"},
      {"beta", "beta: constant, jump:left:right, or analytic:smooth"},
      {"dirichlet", "all or none"},
      {"decomposition", "pafw, ph, sc_pafw or sc_ph"},
      {"factorization", "automatic, chol or icc_sc"},
      {"sc", "static condensation on top of the decomposition (true/false)"},
      {"ordering", "vertex patch ordering: natural, rcm, nd or amd"},
      {"rtol", "relative tolerance"},
      {"maxit", "iteration limit"},
  };

  CommonOptions basis_o, spy_o, riesz_o, sweep_o, hodge_o, complexity_o, mesh_o;
  int basis_p = 2;
  bool mesh_info = false;

  auto* basis = app.add_subcommand("basis", "print the 1D FDM basis S, eigenvalues, D and mass B as text matrices");
  basis->add_option("-p,--p", basis_p, "polynomial degree")->required();
  basis->add_option("-o,--out", basis_o.out, "output file");

  auto* spy = app.add_subcommand("spy", "write coordinate-list patterns of a patch matrix and its factor");
  add_common(spy, spy_o, with_mesh(solver_keys));
  spy->add_flag("--markdown", spy_o.markdown, "ignored");

  auto* riesz = app.add_subcommand("riesz", "solve a weighted Riesz map with preconditioned CG");
  add_common(riesz, riesz_o, with_mesh(solver_keys));
  riesz->add_flag("--markdown", riesz_o.markdown, "Markdown table instead of CSV");

  auto* sweep = app.add_subcommand("sweep", "iteration counts over an (alpha, beta) grid");
  auto sweep_keys = with_mesh(solver_keys);
  sweep_keys.push_back({"alphas", "comma-separated alpha values"});
  sweep_keys.push_back({"betas", "comma-separated beta values"});
  sweep_keys.push_back({"scale", "scale factor for the invariance check (default 1e3)"});
  add_common(sweep, sweep_o, sweep_keys);
  sweep->add_flag("--markdown", sweep_o.markdown, "Markdown table instead of CSV");

  auto* hodge = app.add_subcommand("hodge", "mixed Hodge Laplacian with block-diagonal preconditioned MINRES");
  add_common(hodge, hodge_o,
             with_mesh({{"k", "form degree of u (1, 2 or 3)"},
                        {"p", "polynomial degree, or a comma-separated list"},
                        {"chebyshev_steps", "Chebyshev steps per block (default 4)"},
                        {"lanczos_steps", "Lanczos steps for the Chebyshev interval (default 10)"},
                        {"rtol", "relative tolerance"},
                        {"maxit", "iteration limit"}}));
  hodge->add_flag("--markdown", hodge_o.markdown, "Markdown table instead of CSV");

  auto* complexity = app.add_subcommand("complexity", "factor nnz, flop and memory counters against p");
  add_common(complexity, complexity_o,
             with_mesh({{"k", "form degree (default 0)"}, {"p", "comma-separated degrees (default 4,6,8,10)"}}));

  auto* mesh = app.add_subcommand("mesh", "write a (distorted, refined) box mesh in hexmesh v1 format");
  add_common(mesh, mesh_o, kMeshKeys);
  mesh->add_flag("--info", mesh_info, "print mesh statistics instead of the mesh");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  try {
    if (*basis) return cmd_basis(basis_o, basis_p);
    if (*spy) return cmd_spy(spy_o);
    if (*riesz) return cmd_riesz(riesz_o);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*hodge) return cmd_hodge(hodge_o);
    if (*complexity) return cmd_complexity(complexity_o);
    if (*mesh) return cmd_mesh(mesh_o, mesh_info);
  } catch (const InvalidArgument& e) {
    std::cerr << "fdmsolve: invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const ParseError& e) {
    std::cerr << "fdmsolve: invalid input: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const InvalidData& e) {
    std::cerr << "fdmsolve: invalid data: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "fdmsolve: numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const InvalidStructure& e) {
    std::cerr << "fdmsolve: numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "fdmsolve: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
