#include <gtest/gtest.h>

#include <cmath>
#include <tuple>

#include "fdm/assembly.hpp"
#include "fdm/cholesky.hpp"
#include "fdm/errors.hpp"
#include "fe_oracle.hpp"
#include "oracles.hpp"

using namespace fdm;

namespace {

MeshComplex perturbed_cell() {
  MeshComplex m = build_box_mesh(1, 1, 1);
  auto& x = m.coordinates();
  x[1] += Point(0.10, -0.05, 0.03);
  x[3] += Point(-0.07, 0.08, 0.02);
  x[6] += Point(0.04, 0.06, -0.09);
  x[7] += Point(0.12, 0.05, 0.10);
  return m;
}

Matrix dense_apply(const RieszOperator& op) {
  Matrix a(op.size(), op.size());
  for (int j = 0; j < op.size(); ++j) a.col(j) = op.apply(Vector::Unit(op.size(), j));
  return a;
}

}  // namespace

TEST(Assembly, QuadratureSize) {
  EXPECT_EQ(operator_quadrature_size(1), 3);
  EXPECT_EQ(operator_quadrature_size(2), 5);
  EXPECT_EQ(operator_quadrature_size(3), 6);
  EXPECT_EQ(operator_quadrature_size(5), 9);
}

TEST(Assembly, SingleCellExample) {
  // k=0, p=2, unit cube, all Dirichlet: the only free function is s1 s1 s1.
  const MeshComplex mesh = build_box_mesh(1, 1, 1);
  const FdmBasis1D basis = build_fdm_basis(2);
  const DofMap dm = build_dofmap(mesh, 0, 2, Dirichlet::all);
  ASSERT_EQ(dm.num_free, 1);
  const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
  const double a = op.apply(Vector::Ones(1))[0];
  // Reference interval mass of s1 is 1, stiffness is lambda1 = 5/2; h/2 = 1/2 per direction.
  const Matrix oracle_a = oracle::global_matrix(mesh, dm, basis, 1.0, 1.0, 5);
  EXPECT_NEAR(a, oracle_a(0, 0), 1e-12);
  EXPECT_NEAR(a, 0.125 + 3.0 * 2.5 * 0.5, 1e-12);
}

class CellOracle : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(CellOracle, MatrixFreeMatchesPointwiseAssembly) {
  const auto [k, p] = GetParam();
  const MeshComplex mesh = perturbed_cell();
  const FdmBasis1D basis = build_fdm_basis(p);
  const DofMap dm = build_dofmap(mesh, k, p, Dirichlet::none);
  const RieszOperator op(mesh, dm, basis, CoefficientField::constant(0.7), CoefficientField::constant(1.9));
  const Matrix ref = oracle::global_matrix(mesh, dm, basis, 0.7, 1.9, operator_quadrature_size(p));
  const Matrix got = dense_apply(op);
  EXPECT_LT((got - ref).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  const Matrix cm = op.cell_matrix(0);
  const Matrix ref_cell = oracle::cell_matrix(mesh, 0, k, basis, 0.7, 1.9, operator_quadrature_size(p));
  EXPECT_LT((cm - ref_cell).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
}

INSTANTIATE_TEST_SUITE_P(AllForms, CellOracle, ::testing::Combine(::testing::Values(0, 1, 2, 3), ::testing::Values(1, 2, 3)));

TEST(Assembly, ConvergedQuadratureOnDistortedMesh) {
  // High-order pointwise quadrature against the operator's rule.
  const MeshComplex mesh = build_box_mesh(2, 2, 2, Distortion::jitter(0.1, 5));
  const FdmBasis1D basis = build_fdm_basis(2);
  for (int k = 0; k <= 3; ++k) {
    const DofMap dm = build_dofmap(mesh, k, 2, Dirichlet::all);
    const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
    const Matrix ref = oracle::global_matrix(mesh, dm, basis, 1.0, 1.0, 12);
    EXPECT_LT((dense_apply(op) - ref).cwiseAbs().maxCoeff(), 1e-3 * ref.cwiseAbs().maxCoeff()) << k;
  }
}

TEST(Assembly, ConstantMassAndSymmetry) {
  for (const auto& dist : {Distortion::none(), Distortion::jitter(0.1, 2), Distortion::smooth(0.1)}) {
    const MeshComplex mesh = build_box_mesh(2, 2, 2, dist);
    for (int p : {1, 3, 4}) {
      const FdmBasis1D basis = build_fdm_basis(p);
      const DofMap dm = build_dofmap(mesh, 0, p, Dirichlet::none);
      const RieszOperator mass(mesh, dm, basis, CoefficientField::constant(0.0), CoefficientField::constant(1.0));
      const Vector one = oracle::constant_one(mesh, dm, basis);
      EXPECT_NEAR(one.dot(mass.apply(one)), 1.0, 1e-10);
      const RieszOperator stiff(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(0.0));
      EXPECT_LT(stiff.apply(one).cwiseAbs().maxCoeff(), 1e-11);
    }
    for (int k = 0; k <= 3; ++k) {
      const FdmBasis1D basis = build_fdm_basis(3);
      const DofMap dm = build_dofmap(mesh, k, 3, Dirichlet::all);
      const RieszOperator op(mesh, dm, basis, CoefficientField::constant(2.0), CoefficientField::constant(0.3));
      for (int t = 0; t < 5; ++t) {
        const Vector u = oracle::random_vector(op.size(), 10 + t), v = oracle::random_vector(op.size(), 20 + t);
        const double vau = v.dot(op.apply(u)), uav = u.dot(op.apply(v));
        EXPECT_LT(std::abs(vau - uav), 1e-10 * std::max(std::abs(vau), 1.0));
        EXPECT_GT(u.dot(op.apply(u)), 0.0);
      }
    }
  }
}

TEST(Assembly, CellwiseAndAnalyticCoefficients) {
  const MeshComplex mesh = build_box_mesh(2, 2, 2, Distortion::smooth(0.1));
  const FdmBasis1D basis = build_fdm_basis(2);
  const DofMap dm = build_dofmap(mesh, 0, 2, Dirichlet::none);
  const Vector one = oracle::constant_one(mesh, dm, basis);
  // Weighted volume as a sum of per-cell volumes.
  std::vector<double> vals(8);
  double expected = 0.0;
  for (int c = 0; c < 8; ++c) {
    vals[c] = 1.0 + c;
    std::vector<double> indicator(8, 0.0);
    indicator[c] = 1.0;
    const RieszOperator vol(mesh, dm, basis, CoefficientField::constant(0.0), CoefficientField::cellwise(indicator));
    expected += vals[c] * one.dot(vol.apply(one));
  }
  const RieszOperator op(mesh, dm, basis, CoefficientField::constant(0.0), CoefficientField::cellwise(vals));
  EXPECT_NEAR(one.dot(op.apply(one)), expected, 1e-12);

  const MeshComplex cart = build_box_mesh(2, 2, 2);
  const RieszOperator lin(cart, dm, basis, CoefficientField::constant(0.0),
                          CoefficientField::analytic([](const Point& x) { return 1.0 + x[0]; }));
  // The integral of 1 + x over the unit box is exact under the quadrature.
  EXPECT_NEAR(one.dot(lin.apply(one)), 1.5, 1e-12);
  const CoefficientField s = CoefficientField::constant(2.0).scaled(3.0);
  EXPECT_DOUBLE_EQ(s.at(0, Point::Zero()), 6.0);
}

TEST(Assembly, SizeMismatchThrows) {
  const MeshComplex mesh = build_box_mesh(1, 1, 1);
  const FdmBasis1D basis = build_fdm_basis(2);
  const DofMap dm = build_dofmap(mesh, 1, 2, Dirichlet::none);
  const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
  EXPECT_THROW(op.apply(Vector::Zero(op.size() + 1)), InvalidArgument);
}

TEST(Assembly, FlopCounterReproducible) {
  const MeshComplex mesh = build_box_mesh(2, 2, 2, Distortion::jitter(0.1, 1));
  const FdmBasis1D basis = build_fdm_basis(3);
  const DofMap dm = build_dofmap(mesh, 1, 3, Dirichlet::all);
  const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
  const Vector u = oracle::random_vector(op.size(), 4);
  op.reset_flops();
  op.apply(u);
  const auto f1 = op.flops();
  op.reset_flops();
  op.apply(u);
  EXPECT_EQ(op.flops(), f1);
  EXPECT_GT(f1, 0u);
}

class AuxiliaryExact : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(AuxiliaryExact, CartesianConstantCoefficients) {
  const auto [k, p] = GetParam();
  const MeshComplex mesh = build_box_mesh(2, 2, 2);
  const FdmBasis1D basis = build_fdm_basis(p);
  const DofMap dm = build_dofmap(mesh, k, p, Dirichlet::all);
  const RieszOperator op(mesh, dm, basis, CoefficientField::constant(3.0), CoefficientField::constant(0.25));
  const CsrMatrix aux = assemble_auxiliary(op);
  aux.validate();
  EXPECT_LE(aux.asymmetry(), 1e-12 * aux.max_abs());
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Vector u = oracle::random_vector(op.size(), 100 + t);
    const Vector v = oracle::random_vector(op.size(), 200 + t);
    const double ref = v.dot(op.apply(u));
    worst = std::max(worst, std::abs(ref - v.dot(aux * u)) / (v.norm() * op.apply(u).norm()));
  }
  EXPECT_LT(worst, 1e-9);
  if (p <= 3) {
    const Matrix ref = oracle::global_matrix(mesh, dm, basis, 3.0, 0.25, p + 2);
    EXPECT_LT((aux.to_dense() - ref).cwiseAbs().maxCoeff(), 1e-9 * ref.cwiseAbs().maxCoeff());
  }
}

INSTANTIATE_TEST_SUITE_P(UpToFive, AuxiliaryExact,
                         ::testing::Combine(::testing::Values(0, 1, 2, 3), ::testing::Values(1, 2, 3, 4, 5)));

TEST(Auxiliary, InteriorBlockSparsityOnCartesianCells) {
  const MeshComplex mesh = build_box_mesh(2, 2, 2);
  for (int p : {3, 4, 5}) {
    const FdmBasis1D basis = build_fdm_basis(p);
    for (int k = 0; k <= 3; ++k) {
      const DofMap dm = build_dofmap(mesh, k, p, Dirichlet::all);
      const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1e-3));
      const CsrMatrix aux = assemble_auxiliary(op);
      const int bound = (k == 0 || k == 3) ? 1 : 3;
      for (int i = 0; i < dm.num_free; ++i) {
        if (dm.owner_dim[i] != 3) continue;
        int nnz = 0;
        for (int t = aux.row_ptr[i]; t < aux.row_ptr[i + 1]; ++t)
          if (dm.owner_dim[aux.col_idx[t]] == 3 && aux.values[t] != 0.0) ++nnz;
        EXPECT_LE(nnz, bound) << "k=" << k << " p=" << p << " row " << i;
      }
    }
  }
}

TEST(Auxiliary, SpectrallyEquivalentOnJitteredMesh) {
  const MeshComplex mesh = build_box_mesh(2, 2, 2, Distortion::jitter(0.1, 7));
  for (int p : {2, 4, 7}) {
    const FdmBasis1D basis = build_fdm_basis(p);
    for (int k = 0; k <= 2; ++k) {
      const DofMap dm = build_dofmap(mesh, k, p, Dirichlet::all);
      const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
      const CsrMatrix aux = assemble_auxiliary(op);
      double lo = 1e300, hi = 0.0;
      for (int t = 0; t < 50; ++t) {
        const Vector u = oracle::random_vector(op.size(), 300 + t);
        const double q = u.dot(op.apply(u)) / u.dot(aux * u);
        lo = std::min(lo, q), hi = std::max(hi, q);
      }
      EXPECT_GE(lo, 0.1) << k << " " << p;
      EXPECT_LE(hi, 10.0) << k << " " << p;
    }
  }
}

TEST(P1, SevenPointCenterValue) {
  // Trilinear elements on h = 1/2: the center of the 27-point Laplace stencil is 8h/3.
  const MeshComplex mesh = build_box_mesh(2, 2, 2);
  const DofMap dm = build_dofmap(mesh, 0, 1, Dirichlet::all);
  const CsrMatrix a0 = assemble_p1(mesh, dm, CoefficientField::constant(1.0), CoefficientField::constant(0.0));
  ASSERT_EQ(a0.rows, 1);
  EXPECT_NEAR(a0.at(0, 0), 4.0 / 3.0, 1e-13);
}

TEST(P1, MatchesPointwiseOracleOnJitteredMesh) {
  const MeshComplex mesh = build_box_mesh(2, 2, 2, Distortion::jitter(0.1, 3));
  const FdmBasis1D basis = build_fdm_basis(1);
  for (int k = 0; k <= 3; ++k)
    for (Dirichlet dir : {Dirichlet::all, Dirichlet::none}) {
      const DofMap dm = build_dofmap(mesh, k, 1, dir);
      const CsrMatrix a0 = assemble_p1(mesh, dm, CoefficientField::constant(1.5), CoefficientField::constant(0.5));
      const Matrix ref = oracle::global_matrix(mesh, dm, basis, 1.5, 0.5, 3);
      EXPECT_LT((a0.to_dense() - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
      EXPECT_LT(a0.asymmetry(), 1e-14);
      EXPECT_NO_THROW(cholesky(a0, Ordering::natural));
    }
  const DofMap dm0 = build_dofmap(mesh, 0, 1, Dirichlet::none);
  const CsrMatrix lap = assemble_p1(mesh, dm0, CoefficientField::constant(1.0), CoefficientField::constant(0.0));
  EXPECT_LT((lap * Vector::Ones(dm0.num_free)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(assemble_p1(mesh, build_dofmap(mesh, 0, 2, Dirichlet::none), CoefficientField::constant(1.0),
                           CoefficientField::constant(1.0)),
               InvalidArgument);
}

TEST(Transfer, ComplexProperty) {
  const MeshComplex mesh = build_box_mesh(2, 1, 2, Distortion::none());
  for (int p = 1; p <= 4; ++p) {
    const FdmBasis1D basis = build_fdm_basis(p);
    for (Dirichlet dir : {Dirichlet::all, Dirichlet::none}) {
      std::vector<DofMap> dm;
      for (int k = 0; k <= 3; ++k) dm.push_back(build_dofmap(mesh, k, p, dir));
      const CsrMatrix grad = assemble_transfer(mesh, dm[0], dm[1], basis);
      const CsrMatrix curl = assemble_transfer(mesh, dm[1], dm[2], basis);
      const CsrMatrix div = assemble_transfer(mesh, dm[2], dm[3], basis);
      EXPECT_LT(multiply(curl, grad).max_abs(), 1e-12);
      EXPECT_LT(multiply(div, curl).max_abs(), 1e-12);
      if (dir == Dirichlet::none) {
        const Vector one = oracle::constant_one(mesh, dm[0], basis);
        EXPECT_LT((grad * one).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
  const FdmBasis1D b2 = build_fdm_basis(2);
  EXPECT_THROW(assemble_transfer(mesh, build_dofmap(mesh, 0, 2, Dirichlet::all), build_dofmap(mesh, 2, 2, Dirichlet::all), b2),
               InvalidArgument);
}

TEST(Transfer, CommutesWithContinuousDerivatives) {
  // D is geometry independent: the reference derivative of u equals the reference field of D u
  // (the curl block carries the sign of the FDM relation).
  const MeshComplex mesh = build_box_mesh(2, 2, 1, Distortion::none());
  const FdmBasis1D basis = build_fdm_basis(3);
  const double sign[4] = {0.0, 1.0, -1.0, 1.0};
  for (int k = 1; k <= 3; ++k) {
    const DofMap src = build_dofmap(mesh, k - 1, 3, Dirichlet::none);
    const DofMap dst = build_dofmap(mesh, k, 3, Dirichlet::none);
    const CsrMatrix d = assemble_transfer(mesh, src, dst, basis);
    const Vector u = oracle::random_vector(src.num_free, 40 + k);
    const Vector du = d * u;
    for (int c = 0; c < mesh.num_cells(); ++c)
      for (const auto& xi : {oracle::Vec3(0.3, -0.7, 0.1), oracle::Vec3(-1.0, 0.25, 0.9)}) {
        const auto a = oracle::evaluate(src, basis, u, c, xi);
        const auto b = oracle::evaluate(dst, basis, du, c, xi);
        EXPECT_LT((sign[k] * a.deriv - b.value).norm(), 1e-11) << k;
      }
  }
}

TEST(Transfer, CoarseEmbeddingReproducesFields) {
  const MeshComplex mesh = build_box_mesh(2, 1, 2);
  const FdmBasis1D b1 = build_fdm_basis(1);
  for (int p : {2, 4}) {
    const FdmBasis1D bp = build_fdm_basis(p);
    for (int k = 0; k <= 3; ++k) {
      const DofMap coarse = build_dofmap(mesh, k, 1, Dirichlet::none);
      const DofMap fine = build_dofmap(mesh, k, p, Dirichlet::none);
      const CsrMatrix e = assemble_coarse_embedding(mesh, coarse, fine, bp);
      ASSERT_EQ(e.rows, fine.num_free);
      ASSERT_EQ(e.cols, coarse.num_free);
      const Vector u = oracle::random_vector(coarse.num_free, 9 + k);
      const Vector v = e * u;
      for (int c = 0; c < mesh.num_cells(); ++c) {
        const oracle::Vec3 xi(0.2, -0.4, 0.65);
        EXPECT_LT((oracle::evaluate(coarse, b1, u, c, xi).value - oracle::evaluate(fine, bp, v, c, xi).value).norm(),
                  1e-12);
      }
    }
  }
}

TEST(Rhs, RieszRepresentative) {
  const MeshComplex mesh = build_box_mesh(2, 2, 2, Distortion::jitter(0.1, 1));
  const FdmBasis1D basis = build_fdm_basis(3);
  const DofMap dm = build_dofmap(mesh, 2, 3, Dirichlet::all);
  Vector w;
  const Vector f = assemble_rhs(mesh, dm, basis, 42, &w);
  const Vector f2 = assemble_rhs(mesh, dm, basis, 42);
  EXPECT_EQ(f, f2);
  EXPECT_NE(f, assemble_rhs(mesh, dm, basis, 43));
  EXPECT_LE(w.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_EQ(w, random_coefficients(dm.num_free, 42));
  const RieszOperator op(mesh, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
  EXPECT_LT((op.apply(w) - f).cwiseAbs().maxCoeff(), 1e-13 * f.cwiseAbs().maxCoeff());
  // Solving with the unit-coefficient operator recovers w.
  const Matrix a = dense_apply(op);
  EXPECT_LT((a.ldlt().solve(f) - w).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(PotentialAuxiliary, GradientKernelAndExactness) {
  const MeshComplex mesh = build_box_mesh(2, 1, 2);
  for (int p : {1, 2, 3}) {
    const FdmBasis1D basis = build_fdm_basis(p);
    for (int k : {1, 2}) {
      const DofMap dm = build_dofmap(mesh, k, p, Dirichlet::none);
      const DofMap pot = build_dofmap(mesh, k - 1, p, Dirichlet::none);
      const RieszOperator op(mesh, dm, basis, CoefficientField::constant(5.0), CoefficientField::constant(0.5));
      const CsrMatrix b = assemble_potential_auxiliary(op, pot);
      const CsrMatrix d = assemble_transfer(mesh, pot, dm, basis);
      const Matrix m = oracle::global_matrix(mesh, dm, basis, 0.0, 0.5, p + 2);
      const Matrix dd = d.to_dense();
      const Matrix ref = dd.transpose() * m * dd;
      const double scale = ref.cwiseAbs().maxCoeff();
      if (k == 1) {
        EXPECT_LT((b.to_dense() - ref).cwiseAbs().maxCoeff(), 1e-9 * scale);
        const Vector one = oracle::constant_one(mesh, pot, basis);
        EXPECT_LT((b * one).cwiseAbs().maxCoeff(), 1e-11 * scale);
      } else {
        // The shift is a small multiple of the broken mass.
        const Matrix gap = b.to_dense() - ref;
        EXPECT_LT(gap.cwiseAbs().maxCoeff(), 2e-8 * scale);
        EXPECT_GT(gap.diagonal().minCoeff(), 0.0);
      }
    }
  }
  const MeshComplex jit = build_box_mesh(2, 2, 2, Distortion::jitter(0.1, 4));
  const FdmBasis1D basis = build_fdm_basis(3);
  const DofMap dm = build_dofmap(jit, 2, 3, Dirichlet::all);
  const DofMap pot = build_dofmap(jit, 1, 3, Dirichlet::all);
  const RieszOperator op(jit, dm, basis, CoefficientField::constant(1.0), CoefficientField::constant(1.0));
  const CsrMatrix b = assemble_potential_auxiliary(op, pot);
  EXPECT_NO_THROW(cholesky(b, Ordering::amd));
  EXPECT_THROW(assemble_potential_auxiliary(op, dm), InvalidArgument);
}
