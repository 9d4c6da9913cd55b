#include "fdm/decompositions.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "fdm/errors.hpp"

namespace fdm {

Decomposition parse_decomposition(const std::string& s) {
  if (s == "pafw") return Decomposition::pafw;
  if (s == "ph") return Decomposition::ph;
  if (s == "sc_pafw" || s == "sc-pafw") return Decomposition::sc_pafw;
  if (s == "sc_ph" || s == "sc-ph") return Decomposition::sc_ph;
  throw InvalidArgument("unknown decomposition '" + s + "'");
}

Factorization parse_factorization(const std::string& s) {
  if (s == "auto" || s == "automatic") return Factorization::automatic;
  if (s == "chol" || s == "cholesky") return Factorization::chol;
  if (s == "icc_sc" || s == "icc-sc" || s == "icc") return Factorization::icc_sc;
  throw InvalidArgument("unknown factorization '" + s + "'");
}

std::string to_string(Decomposition d) {
  switch (d) {
    case Decomposition::pafw: return "pafw";
    case Decomposition::ph: return "ph";
    case Decomposition::sc_pafw: return "sc_pafw";
    case Decomposition::sc_ph: return "sc_ph";
  }
  return "?";
}

std::string to_string(Factorization f) {
  switch (f) {
    case Factorization::automatic: return "auto";
    case Factorization::chol: return "chol";
    case Factorization::icc_sc: return "icc_sc";
  }
  return "?";
}

std::string to_string(PatchKind k) {
  switch (k) {
    case PatchKind::vertex_star: return "vertex_star";
    case PatchKind::edge_star: return "edge_star";
    case PatchKind::face_star: return "face_star";
    case PatchKind::cell_interior: return "cell_interior";
  }
  return "?";
}

bool is_condensed(Decomposition d) { return d == Decomposition::sc_pafw || d == Decomposition::sc_ph; }

PatchSet entity_star_patches(const MeshComplex& mesh, const DofMap& dofmap, int dim, bool interface_only) {
  if (dim < 0 || dim > 3) throw InvalidArgument("entity_star_patches: dimension must be in 0..3");
  PatchSet set;
  set.kind = static_cast<PatchKind>(dim);
  set.space_size = dofmap.num_free;
  std::vector<std::vector<int>> by_owner(static_cast<std::size_t>(mesh.num_entities()));
  for (int f = 0; f < dofmap.num_free; ++f) {
    if (interface_only && dofmap.owner_dim[f] == 3) continue;
    by_owner[dofmap.owner[dofmap.free_to_global[f]]].push_back(f);
  }
  std::vector<char> covered(dofmap.num_free, 0);
  auto star_dofs = [&](const Entity& e) {
    std::vector<int> dofs;
    for (const Entity& s : mesh.star(e)) {
      const auto& own = by_owner[mesh.id(s)];
      dofs.insert(dofs.end(), own.begin(), own.end());
    }
    std::sort(dofs.begin(), dofs.end());
    return dofs;
  };
  for (int id = 0; id < mesh.num_entities(); ++id) {
    const Entity e = mesh.entity(id);
    if (e.dim() != dim) continue;
    if (dofmap.dirichlet == Dirichlet::all && mesh.on_boundary(e)) continue;
    auto dofs = star_dofs(e);
    if (dofs.empty()) continue;
    for (int f : dofs) covered[f] = 1;
    set.patches.push_back(std::move(dofs));
  }
  for (int f = 0; f < dofmap.num_free; ++f) {
    if (covered[f] || (interface_only && dofmap.owner_dim[f] == 3)) continue;
    auto dofs = star_dofs(mesh.entity(dofmap.owner[dofmap.free_to_global[f]]));
    for (int g : dofs) covered[g] = 1;
    set.patches.push_back(std::move(dofs));
    ++set.fallback_patches;
  }
  return set;
}

PatchCollection build_patches(const MeshComplex& mesh, const DofMap& dofmap, Decomposition decomposition,
                              const DofMap* potential) {
  const int k = dofmap.element.k;
  const bool sc = is_condensed(decomposition);
  const bool hiptmair = (decomposition == Decomposition::ph || decomposition == Decomposition::sc_ph) && k > 0;
  if (k == 3 && decomposition != Decomposition::pafw)
    throw InvalidArgument("build_patches: only pafw is available for k = 3");
  PatchCollection out;
  out.decomposition = decomposition;
  out.primal = entity_star_patches(mesh, dofmap, hiptmair ? k : 0, sc);
  if (hiptmair) {
    if (!potential || potential->element.k != k - 1 || potential->element.p != dofmap.element.p ||
        potential->dirichlet != dofmap.dirichlet)
      throw InvalidArgument("build_patches: " + to_string(decomposition) + " needs the V^{k-1} DOF map");
    out.potential = entity_star_patches(mesh, *potential, k - 1, sc);
  }
  if (sc) {
    PatchSet interiors;
    interiors.kind = PatchKind::cell_interior;
    interiors.space_size = dofmap.num_free;
    interiors.patches.resize(mesh.num_cells());
    const int first_cell = mesh.num_entities() - mesh.num_cells();  // cells come last in the global order
    for (int f = 0; f < dofmap.num_free; ++f)
      if (dofmap.owner_dim[f] == 3)
        interiors.patches[dofmap.owner[dofmap.free_to_global[f]] - first_cell].push_back(f);
    out.interiors = std::move(interiors);
  }
  return out;
}

PatchStage::PatchStage(const CsrMatrix& a, const PatchSet& patches, Factorization factorization, int form_degree,
                       std::span<const int> index, std::span<const Point> points, std::span<const char> interior,
                       std::span<const int> groups, Ordering vertex_ordering)
    : n_(a.rows) {
  for (std::size_t pi = 0; pi < patches.patches.size(); ++pi) {
    std::vector<int> rows;
    for (int f : patches.patches[pi]) {
      const int r = index.empty() ? f : index[f];
      if (r >= 0) rows.push_back(r);
    }
    if (rows.empty()) continue;
    Factorization f = factorization;
    if (f == Factorization::automatic)
      f = patches.kind == PatchKind::vertex_star && form_degree == 0 ? Factorization::icc_sc : Factorization::chol;
    const CsrMatrix sub = a.submatrix(rows);
    std::vector<Point> pts;
    if (!points.empty())
      for (int r : rows) pts.push_back(points[r]);
    try {
      if (f == Factorization::icc_sc) {
        std::vector<char> in(rows.size(), 0);
        std::vector<int> grp;
        for (std::size_t q = 0; q < rows.size(); ++q) {
          if (!interior.empty()) in[q] = interior[rows[q]];
          if (!groups.empty()) grp.push_back(groups[rows[q]]);
        }
        const ScPattern sp = sc_pattern(sub, in, grp, pts);
        factors_.push_back(icc_imposed(sub, sp.pattern, sp.perm));
      } else {
        const Ordering ord = patches.kind == PatchKind::edge_star || patches.kind == PatchKind::face_star
                                 ? Ordering::rcm
                                 : vertex_ordering;
        factors_.push_back(cholesky(sub, ord, pts));
      }
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("patch " + std::to_string(pi) + " (" + to_string(patches.kind) + "): " + e.what());
    }
    kinds_.push_back(f);
    dofs_.push_back(std::move(rows));
  }
}

void PatchStage::apply_add(const Vector& r, Vector& out) const {
  std::vector<double> rhs, work;
  for (std::size_t pi = 0; pi < dofs_.size(); ++pi) {
    const auto& rows = dofs_[pi];
    rhs.resize(rows.size());
    for (std::size_t q = 0; q < rows.size(); ++q) rhs[q] = r[rows[q]];
    factors_[pi].solve(rhs, rhs, work);
    for (std::size_t q = 0; q < rows.size(); ++q) out[rows[q]] += rhs[q];
  }
}

std::int64_t PatchStage::factor_nnz() const {
  std::int64_t s = 0;
  for (const auto& f : factors_) s += f.nnz();
  return s;
}

std::size_t PatchStage::bytes() const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) s += factors_[i].bytes() + dofs_[i].size() * sizeof(int);
  return s;
}

double PatchStage::max_shift() const {
  double s = 0.0;
  for (const auto& f : factors_) s = std::max(s, f.shift);
  return s;
}

std::uint64_t PatchStage::flops_per_apply() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    s += 4ULL * static_cast<std::uint64_t>(factors_[i].nnz()) + dofs_[i].size();
  return s;
}

Relaxation::Relaxation(std::unique_ptr<PatchStage> primal, std::unique_ptr<PatchStage> potential, CsrMatrix transfer)
    : primal_(std::move(primal)), potential_(std::move(potential)), transfer_(std::move(transfer)) {
  if (potential_) {
    if (transfer_.rows != primal_->size() || transfer_.cols != potential_->size())
      throw InvalidArgument("Relaxation: transfer has the wrong shape");
    transfer_t_ = transfer_.transpose();
  }
}

Vector Relaxation::apply(const Vector& r) const {
  Vector out = Vector::Zero(r.size());
  primal_->apply_add(r, out);
  if (potential_) {
    const Vector t = transfer_t_ * r;
    Vector u = Vector::Zero(t.size());
    potential_->apply_add(t, u);
    transfer_.multiply_add(std::span<const double>(u.data(), u.size()), std::span<double>(out.data(), out.size()));
  }
  return out;
}

std::int64_t Relaxation::factor_nnz() const {
  return primal_->factor_nnz() + (potential_ ? potential_->factor_nnz() : 0);
}

std::size_t Relaxation::bytes() const {
  return primal_->bytes() + (potential_ ? potential_->bytes() + transfer_.bytes() + transfer_t_.bytes() : 0);
}

std::uint64_t Relaxation::flops_per_apply() const {
  std::uint64_t s = primal_->flops_per_apply();
  if (potential_) s += potential_->flops_per_apply() + 4ULL * static_cast<std::uint64_t>(transfer_.nnz());
  return s;
}

double Relaxation::max_shift() const {
  return std::max(primal_->max_shift(), potential_ ? potential_->max_shift() : 0.0);
}

namespace {

std::vector<int> positions(int n, const std::vector<int>& subset) {
  std::vector<int> pos(n, -1);
  for (std::size_t a = 0; a < subset.size(); ++a) pos[subset[a]] = static_cast<int>(a);
  return pos;
}

template <class T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<int>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace

TwoLevelPreconditioner::TwoLevelPreconditioner(const RieszOperator& op, const PreconditionerOptions& options)
    : options_(options) {
  const auto t0 = std::chrono::steady_clock::now();
  const MeshComplex& mesh = op.mesh();
  const DofMap& dm = op.dofmap();
  const FdmBasis1D& basis = op.basis();
  const int k = op.k(), p = op.p();
  if (k > 2) throw InvalidArgument("TwoLevelPreconditioner: k must be 0, 1 or 2");
  const Decomposition dec = options.decomposition;
  const bool sc = is_condensed(dec);
  const bool hiptmair = (dec == Decomposition::ph || dec == Decomposition::sc_ph) && k > 0;
  if (hiptmair) potential_dofmap_ = std::make_unique<DofMap>(build_dofmap(mesh, k - 1, p, dm.dirichlet));
  patches_ = build_patches(mesh, dm, dec, potential_dofmap_.get());

  p_ = assemble_auxiliary(op);
  setup_.aux_nnz = p_.nnz();
  const std::vector<char> interior = dm.cell_interior_mask();

  const CsrMatrix* level = &p_;
  std::vector<int> index;
  std::vector<Point> points = dm.location;
  std::vector<char> level_interior = interior;
  std::vector<int> level_groups = dm.interior_group;
  if (sc) {
    condensed_ = std::make_unique<CondensedOperator>(p_, interior, dm.interior_group);
    level = &condensed_->schur();
    setup_.schur_nnz = level->nnz();
    index = positions(dm.num_free, condensed_->interface_dofs());
    points = gather(dm.location, condensed_->interface_dofs());
    level_interior.assign(condensed_->interface_size(), 0);
    level_groups.clear();
  }
  auto primal = std::make_unique<PatchStage>(*level, patches_.primal, options.factorization, k, index, points,
                                             level_interior, level_groups, options.vertex_ordering);
  setup_.primal_patches = primal->num_patches();

  std::unique_ptr<PatchStage> potential;
  CsrMatrix transfer;
  if (hiptmair) {
    const DofMap& pdm = *potential_dofmap_;
    const CsrMatrix b = assemble_potential_auxiliary(op, pdm);
    CsrMatrix d = assemble_transfer(mesh, pdm, dm, basis);
    const std::vector<char> pint = pdm.cell_interior_mask();
    if (sc) {
      potential_condensed_ = std::make_unique<CondensedOperator>(b, pint, pdm.interior_group);
      const auto& pif = potential_condensed_->interface_dofs();
      potential = std::make_unique<PatchStage>(potential_condensed_->schur(), *patches_.potential,
                                               options.factorization, k - 1, positions(pdm.num_free, pif),
                                               gather(pdm.location, pif), std::vector<char>(pif.size(), 0),
                                               std::vector<int>{}, options.vertex_ordering);
      transfer = d.submatrix(condensed_->interface_dofs(), pif);
    } else {
      potential = std::make_unique<PatchStage>(b, *patches_.potential, options.factorization, k - 1,
                                               std::vector<int>{}, pdm.location, pint, pdm.interior_group,
                                               options.vertex_ordering);
      transfer = std::move(d);
    }
    setup_.potential_patches = potential->num_patches();
  }
  relaxation_ = std::make_unique<Relaxation>(std::move(primal), std::move(potential), std::move(transfer));

  const DofMap dm1 = build_dofmap(mesh, k, 1, dm.dirichlet);
  const CsrMatrix a0 = assemble_p1(mesh, dm1, op.alpha(), op.beta());
  coarse_ = cholesky(a0, Ordering::nested_dissection, dm1.location);
  CsrMatrix e = assemble_coarse_embedding(mesh, dm1, dm, basis);
  if (sc) {
    const auto all = natural_ordering(dm1.num_free);
    e = e.submatrix(condensed_->interface_dofs(), all);
  }
  embed_ = std::move(e);
  embed_t_ = embed_.transpose();
  setup_.coarse_nnz = coarse_.nnz();
  // At p = 1 the coarse space is the whole space and its operator is the true one.
  direct_ = p == 1;
  setup_.factor_nnz = relaxation_->factor_nnz();
  setup_.max_shift = relaxation_->max_shift();

  if (options.omega > 0.0) {
    omega_ = options.omega;
  } else {
    const auto [lo, hi] = ritz_extremes([this](const Vector& x) { return level_apply(x); },
                                        [this](const Vector& r) { return smooth(r); }, level_size(),
                                        options.lanczos_steps, options.seed);
    (void)lo;
    omega_ = 2.0 / (1.2 * hi);
  }
  setup_.omega = omega_;
  setup_.bytes = p_.bytes() + relaxation_->bytes() + coarse_.bytes() + embed_.bytes() + embed_t_.bytes() +
                 (condensed_ ? condensed_->schur().bytes() : 0);
  setup_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int TwoLevelPreconditioner::level_size() const {
  return condensed_ ? condensed_->interface_size() : p_.rows;
}

Vector TwoLevelPreconditioner::level_apply(const Vector& x) const {
  return condensed_ ? condensed_->schur() * x : p_ * x;
}

Vector TwoLevelPreconditioner::cycle(const Vector& r) const {
  if (direct_) return embed_ * coarse_.solve(embed_t_ * r);
  Vector x = omega_ * smooth(r);
  Vector res = r - level_apply(x);
  x += embed_ * coarse_.solve(embed_t_ * res);
  res = r - level_apply(x);
  x += omega_ * smooth(res);
  return x;
}

Vector TwoLevelPreconditioner::apply(const Vector& r) const {
  flops_ += flops_per_apply();
  if (!condensed_) return cycle(r);
  return condensed_->complete(cycle(condensed_->restrict_interface(r)), r);
}

LinearMap TwoLevelPreconditioner::as_map() const {
  return [this](const Vector& r) { return apply(r); };
}

std::uint64_t TwoLevelPreconditioner::flops_per_apply() const {
  const CsrMatrix& level = condensed_ ? condensed_->schur() : p_;
  if (direct_)
    return 4ULL * static_cast<std::uint64_t>(coarse_.nnz()) + 4ULL * static_cast<std::uint64_t>(embed_.nnz()) +
           (condensed_ ? 4ULL * static_cast<std::uint64_t>(p_.nnz()) : 0);
  std::uint64_t s = 2 * relaxation_->flops_per_apply() + 4ULL * static_cast<std::uint64_t>(level.nnz()) +
                    4ULL * static_cast<std::uint64_t>(coarse_.nnz()) + 4ULL * static_cast<std::uint64_t>(embed_.nnz());
  if (condensed_) s += 4ULL * static_cast<std::uint64_t>(p_.nnz());
  return s;
}

}  // namespace fdm
