#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "fdm/assembly.hpp"
#include "fdm/decompositions.hpp"
#include "fdm/krylov.hpp"
#include "fdm/mesh.hpp"

namespace fdm {

/// Flat key=value configuration. Later assignments override earlier ones.
class Config {
public:
  static Config parse(const std::string& text);
  static Config from_file(const std::string& path);
  /// "key=value" override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

struct MeshSpec {
  int nx = 2, ny = 2, nz = 2;
  int refine = 0;
  Distortion distortion;
  std::string file;  // hexmesh file; overrides the box when set

  std::string label() const;
};

/// Distorts the base box, then refines uniformly.
MeshComplex make_mesh(const MeshSpec& spec);

/// Constant ("1e-3"), two half-domain values split at x = 0.5 ("jump:1:1e6"), or "analytic:smooth".
CoefficientField parse_coefficient(const std::string& spec, const MeshComplex& mesh);

struct RieszConfig {
  int k = 0;
  int p = 3;
  MeshSpec mesh;
  Dirichlet dirichlet = Dirichlet::all;
  std::string alpha = "1";
  std::string beta = "1e-8";
  PreconditionerOptions preconditioner;
  KrylovOptions krylov;
  std::uint64_t seed = 0;
};

struct RieszResult {
  RieszConfig config;
  int num_dofs = 0;
  SolverReport report;
  PreconditionerSetup setup;
  std::uint64_t operator_flops = 0;        // one application of A
  std::uint64_t preconditioner_flops = 0;  // one application of the preconditioner
  double solution_error = -1.0;            // ||u - w|| / ||w|| when alpha = beta = 1
};

RieszResult run_riesz(const RieszConfig& config);

struct SweepRow {
  double alpha = 0.0, beta = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// (alpha, beta) grid for a Riesz problem; constant coefficients only.
std::vector<SweepRow> run_sweep(const RieszConfig& base, const std::vector<double>& alphas,
                                const std::vector<double>& betas);

struct HodgeConfig {
  int k = 3;
  int p = 3;
  MeshSpec mesh;
  int chebyshev_steps = 4;
  int lanczos_steps = 10;
  KrylovOptions krylov;
  std::uint64_t seed = 0;
};

struct HodgeResult {
  HodgeConfig config;
  int sigma_dofs = 0, u_dofs = 0;
  SolverReport report;
  double residual = 0.0;  // ||b - K x|| / ||b||
};

/// Mixed Hodge Laplacian [[-M_{k-1}, (M_k D)^T], [M_k D, K_k]] with natural boundary conditions.
class HodgeSystem {
public:
  HodgeSystem(const MeshComplex& mesh, int k, int p);
  int size() const { return ns_ + nu_; }
  int sigma_size() const { return ns_; }
  int u_size() const { return nu_; }
  Vector apply(const Vector& x) const;
  /// Off-diagonal blocks: (2,1) maps sigma to the V^k dual, (1,2) its transpose.
  Vector apply_lower(const Vector& sigma) const;
  Vector apply_upper(const Vector& u) const;
  Vector rhs(std::uint64_t seed) const;
  /// Block-diagonal preconditioner of Riesz maps (alpha = beta = 1) via fixed-step Chebyshev.
  LinearMap preconditioner(int chebyshev_steps, int lanczos_steps, std::uint64_t seed) const;
  std::uint64_t flops() const;

  const DofMap& sigma_dofmap() const { return dm_s_; }
  const DofMap& u_dofmap() const { return dm_u_; }

private:
  const MeshComplex* mesh_;
  int k_, p_;
  FdmBasis1D basis_;
  DofMap dm_s_, dm_u_;
  std::unique_ptr<RieszOperator> mass_s_, mass_u_, stiff_u_, riesz_s_, riesz_u_;
  std::unique_ptr<TwoLevelPreconditioner> pc_s_, pc_u_;
  CsrMatrix b_, b_t_;  // M_k D and its transpose
  mutable std::uint64_t coupling_flops_ = 0;
  Vector jacobi_;
  int ns_ = 0, nu_ = 0;
};

HodgeResult run_hodge(const HodgeConfig& config);

struct ComplexityRow {
  int k = 0, p = 0;
  int num_dofs = 0;
  std::int64_t aux_nnz = 0;
  std::int64_t icc_nnz = 0;   // ICC on the condensed pattern, vertex patches
  std::int64_t chol_nnz = 0;  // exact Cholesky, vertex patches
  std::int64_t gll_nnz = 0;   // exact Cholesky of the dense-cell GLL patch pattern
  std::uint64_t cycle_flops = 0;
  std::uint64_t operator_flops = 0;
  std::size_t bytes = 0;
};

ComplexityRow run_complexity(int k, int p, const MeshSpec& mesh);

/// Pattern of a patch matrix in the GLL basis: every pair of patch DOFs sharing a star cell.
CsrMatrix gll_patch_pattern(const MeshComplex& mesh, const DofMap& dofmap, const std::vector<int>& patch);

/// Least-squares slope of log(y) against log(x).
double fitted_exponent(const std::vector<double>& x, const std::vector<double>& y);

void write_riesz_csv_header(std::ostream& out);
void write_riesz_csv(std::ostream& out, const RieszResult& r);

RieszConfig riesz_config_from(const Config& c);
HodgeConfig hodge_config_from(const Config& c);
MeshSpec mesh_spec_from(const Config& c);

}  // namespace fdm
