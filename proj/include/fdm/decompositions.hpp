#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdm/assembly.hpp"
#include "fdm/cholesky.hpp"
#include "fdm/condense.hpp"
#include "fdm/dofmap.hpp"
#include "fdm/krylov.hpp"
#include "fdm/mesh.hpp"

namespace fdm {

enum class Decomposition { pafw, ph, sc_pafw, sc_ph };
enum class Factorization { automatic, chol, icc_sc };
enum class PatchKind { vertex_star, edge_star, face_star, cell_interior };

Decomposition parse_decomposition(const std::string& s);
Factorization parse_factorization(const std::string& s);
std::string to_string(Decomposition d);
std::string to_string(Factorization f);
std::string to_string(PatchKind k);
bool is_condensed(Decomposition d);

struct PatchSet {
  PatchKind kind = PatchKind::vertex_star;
  int space_size = 0;                       // number of free DOFs of the underlying space
  std::vector<std::vector<int>> patches;    // sorted free DOF ids
  int fallback_patches = 0;                 // owner-star patches added to complete the cover
};

struct PatchCollection {
  Decomposition decomposition = Decomposition::pafw;
  PatchSet primal;
  std::optional<PatchSet> potential;   // on V^{k-1}
  std::optional<PatchSet> interiors;   // per-cell interior DOFs (condensed variants)
};

/// Stars of the entities of dimension `dim` that are not on Gamma_D, as free DOF lists of `dofmap`.
/// Any uncovered free DOF gets the star of its owning entity as an extra patch.
PatchSet entity_star_patches(const MeshComplex& mesh, const DofMap& dofmap, int dim, bool interface_only);

/// pafw: vertex stars. ph: stars of k-dimensional entities plus vertex/edge stars of V^{k-1}.
/// Condensed variants keep interface DOFs only and add the cell-interior sets.
PatchCollection build_patches(const MeshComplex& mesh, const DofMap& dofmap, Decomposition decomposition,
                              const DofMap* potential = nullptr);

/// Additive Schwarz stage  sum_i R_i^T A_i^{-1} R_i, optionally wrapped as  T (.) T^T.
class PatchStage {
public:
  /// `index` maps the rows of `a` (numbering of the patch lists) to positions in a; `interior`/`groups`
  /// are per row of `a` and feed the ICC pattern. `points` are per row of `a` (may be empty).
  PatchStage(const CsrMatrix& a, const PatchSet& patches, Factorization factorization, int form_degree,
             std::span<const int> index, std::span<const Point> points, std::span<const char> interior,
             std::span<const int> groups, Ordering vertex_ordering = Ordering::amd);

  void apply_add(const Vector& r, Vector& out) const;
  int size() const { return n_; }
  std::int64_t factor_nnz() const;
  std::size_t bytes() const;
  double max_shift() const;
  std::uint64_t flops_per_apply() const;
  int num_patches() const { return static_cast<int>(dofs_.size()); }
  const std::vector<CholFactor>& factors() const { return factors_; }
  const std::vector<std::vector<int>>& patch_rows() const { return dofs_; }
  const std::vector<Factorization>& kinds() const { return kinds_; }

private:
  int n_ = 0;
  std::vector<std::vector<int>> dofs_;  // rows of a
  std::vector<CholFactor> factors_;
  std::vector<Factorization> kinds_;
};

/// Additive relaxation: primal patches, plus  D (potential patches) D^T  for PH.
class Relaxation {
public:
  Relaxation(std::unique_ptr<PatchStage> primal, std::unique_ptr<PatchStage> potential, CsrMatrix transfer);
  Vector apply(const Vector& r) const;
  const PatchStage& primal() const { return *primal_; }
  const PatchStage* potential() const { return potential_.get(); }
  std::int64_t factor_nnz() const;
  std::size_t bytes() const;
  std::uint64_t flops_per_apply() const;
  double max_shift() const;

private:
  std::unique_ptr<PatchStage> primal_, potential_;
  CsrMatrix transfer_, transfer_t_;
};

struct PreconditionerOptions {
  Decomposition decomposition = Decomposition::sc_ph;
  Factorization factorization = Factorization::automatic;
  Ordering vertex_ordering = Ordering::amd;  // Cholesky ordering of vertex-star patches
  double omega = 0.0;        // smoother damping; 0 selects it from Lanczos estimates
  int lanczos_steps = 30;
  std::uint64_t seed = 0;
};

struct PreconditionerSetup {
  std::int64_t aux_nnz = 0;
  std::int64_t schur_nnz = 0;
  std::int64_t factor_nnz = 0;
  std::int64_t coarse_nnz = 0;
  std::size_t bytes = 0;
  double omega = 0.0;
  double max_shift = 0.0;
  double seconds = 0.0;
  int primal_patches = 0;
  int potential_patches = 0;
};

/// Two-level V(1,1) preconditioner for a Riesz operator built from its auxiliary operator:
/// damped additive patch smoother, exact p=1 coarse solve, multiplicative between levels.
/// At p=1 the cycle reduces to the coarse solve.
class TwoLevelPreconditioner {
public:
  TwoLevelPreconditioner(const RieszOperator& op, const PreconditionerOptions& options = {});

  Vector apply(const Vector& r) const;
  LinearMap as_map() const;

  /// One V-cycle on the level operator (P or S) without condensation wrapping.
  Vector cycle(const Vector& r) const;
  /// Smoother alone, undamped.
  Vector smooth(const Vector& r) const { return relaxation_->apply(r); }
  Vector level_apply(const Vector& x) const;
  int level_size() const;

  const PreconditionerSetup& setup() const { return setup_; }
  const CsrMatrix& auxiliary() const { return p_; }
  const CondensedOperator* condensed() const { return condensed_.get(); }
  const Relaxation& relaxation() const { return *relaxation_; }
  const PatchCollection& patches() const { return patches_; }
  std::uint64_t flops() const { return flops_; }
  void reset_flops() const { flops_ = 0; }
  std::uint64_t flops_per_apply() const;

private:
  PreconditionerOptions options_;
  std::unique_ptr<DofMap> potential_dofmap_;
  PatchCollection patches_;
  CsrMatrix p_;
  std::unique_ptr<CondensedOperator> condensed_;
  std::unique_ptr<CondensedOperator> potential_condensed_;
  std::unique_ptr<Relaxation> relaxation_;
  CholFactor coarse_;
  CsrMatrix embed_, embed_t_;  // onto level rows
  double omega_ = 1.0;
  bool direct_ = false;
  PreconditionerSetup setup_;
  mutable std::uint64_t flops_ = 0;
};

}  // namespace fdm
