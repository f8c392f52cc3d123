// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "mlfeti/error.hpp"
#include "mlfeti/fetidp.hpp"
#include "mlfeti/krylov.hpp"
#include "mlfeti/preconditioners.hpp"
#include "mlfeti/spectrum.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace mlfeti {
namespace {

using dd::ConstraintRecipe;
using testing_support::build;
using testing_support::dense;

std::shared_ptr<const CoarseSolver> exact(const testing_support::Built& b) {
  return std::make_shared<ExactCoarseSolver>(b.fine().coarse.coarse_matrix);
}

class Recipes : public ::testing::TestWithParam<ConstraintRecipe> {
 protected:
  [[nodiscard]] bool edges() const { return GetParam() == ConstraintRecipe::corners_edges; }
};

TEST_P(Recipes, DirichletPreconditionerMatchesOracle) {
  const auto b = build({3}, GetParam());
  const auto o = oracle::two_level(9, 3, edges());
  const DirichletPreconditioner md(b.fine());
  const DenseMatrix m = materialize(md.as_operator());
  EXPECT_LE(oracle::max_abs(m - o.MD), 1e-12);
  EXPECT_LE(oracle::max_abs(m - m.transpose()), 1e-12);
  EXPECT_EQ(md.apply(Vector::Zero(md.size())).norm(), 0.0);
}

TEST_P(Recipes, FetiDpOperatorMatchesOracleAndIsSemidefinite) {
  const auto b = build({3}, GetParam());
  const auto o = oracle::two_level(9, 3, edges());
  const FetiDpOperator f(b.fine(), exact(b));
  const DenseMatrix fm = materialize(f.as_operator());
  EXPECT_LE(oracle::max_abs(fm - o.F), 1e-10);
  EXPECT_LE(oracle::max_abs(fm - fm.transpose()), 1e-10);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (fm + fm.transpose()));
  EXPECT_GE(es.eigenvalues()(0), -1e-10);
}

TEST_P(Recipes, SaddleSystemStructure) {
  const auto b = build({3}, GetParam());
  const auto o = oracle::two_level(9, 3, edges());
  const auto& l = b.fine();
  const FetiDpSaddleSystem saddle(l);
  const DenseMatrix a = materialize(saddle.as_operator());
  const Index nc = saddle.coarse_size();
  const Index nl = saddle.lambda_size();
  EXPECT_LE(oracle::max_abs(a - a.transpose()), 1e-10);
  EXPECT_LE(oracle::max_abs(a.topLeftCorner(nc, nc) - dense(l.coarse.coarse_matrix)), 1e-12);

  // Eliminating the coarse block yields -F.
  const DenseMatrix a11 = a.topLeftCorner(nc, nc);
  const DenseMatrix a12 = a.topRightCorner(nc, nl);
  const DenseMatrix a22 = a.bottomRightCorner(nl, nl);
  const DenseMatrix schur22 = a22 - a12.transpose() * a11.ldlt().solve(a12);
  EXPECT_LE(oracle::max_abs(schur22 + o.F), 1e-10);
  EXPECT_LE(oracle::max_abs(a22 + o.B * o.SdeltaInv * o.B.transpose()), 1e-10);

  const Vector f = o.f_gamma;
  const Vector rhs = saddle.rhs(f);
  const Vector etf = o.E.transpose() * f;
  EXPECT_LE((rhs.tail(nl) + o.B * o.SdeltaInv * etf).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((rhs.head(nc) - dd::apply_basis_transpose(l, etf)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_P(Recipes, SaddleSolutionMatchesFullSystemOracle) {
  const auto b = build({3}, GetParam());
  const auto o = oracle::two_level(9, 3, edges());
  const auto& l = b.fine();
  const FetiDpSaddleSystem saddle(l);
  const DenseMatrix a = materialize(saddle.as_operator());
  const Vector rhs = saddle.rhs(o.f_gamma);
  const Vector x = a.completeOrthogonalDecomposition().solve(rhs);
  EXPECT_LE((a * x - rhs).norm() / rhs.norm(), 1e-10);
  const RecoveredSolution rec = recover_solution(l, x, o.f_gamma);

  // Independent four-field system on (w_Delta, mu, u_c, lambda) with an
  // independent Phi satisfying C Phi = R_c.
  const DenseMatrix& s = o.S;
  const DenseMatrix& c = o.C;
  const DenseMatrix phi = c.transpose() * (c * c.transpose()).ldlt().solve(o.Rc);
  const Index nw = s.rows();
  const Index nx = c.rows();
  const Index nc = phi.cols();
  const Index nl = o.B.rows();
  DenseMatrix full = DenseMatrix::Zero(nw + nx + nc + nl, nw + nx + nc + nl);
  full.block(0, 0, nw, nw) = s;
  full.block(0, nw, nw, nx) = c.transpose();
  full.block(0, nw + nx, nw, nc) = s * phi;
  full.block(0, nw + nx + nc, nw, nl) = o.B.transpose();
  full.block(nw, 0, nx, nw) = c;
  full.block(nw + nx, 0, nc, nw) = phi.transpose() * s;
  full.block(nw + nx, nw + nx, nc, nc) = phi.transpose() * s * phi;
  full.block(nw + nx, nw + nx + nc, nc, nl) = phi.transpose() * o.B.transpose();
  full.block(nw + nx + nc, 0, nl, nw) = o.B;
  full.block(nw + nx + nc, nw + nx, nl, nc) = o.B * phi;
  Vector frhs = Vector::Zero(full.rows());
  const Vector etf = o.E.transpose() * o.f_gamma;
  frhs.head(nw) = etf;
  frhs.segment(nw + nx, nc) = phi.transpose() * etf;
  const Vector y = full.completeOrthogonalDecomposition().solve(frhs);
  EXPECT_LE((full * y - frhs).norm() / frhs.norm(), 1e-10);
  const Vector w_oracle = y.head(nw) + phi * y.segment(nw + nx, nc);

  const Vector exact_interface = o.Shat.ldlt().solve(o.f_gamma);
  EXPECT_LE((o.E * w_oracle - exact_interface).norm() / exact_interface.norm(), 1e-10);
  EXPECT_LE((rec.interface - exact_interface).norm() / exact_interface.norm(), 1e-10);
  EXPECT_LE((rec.w - w_oracle).norm() / w_oracle.norm(), 1e-9);
  EXPECT_LE(rec.jump_norm, 1e-10 * rec.w.norm());

  const Vector u_direct = oracle::solve_spd(o.p.K, o.p.f);
  EXPECT_LE((rec.field - u_direct).norm() / u_direct.norm(), 1e-10);
}

TEST(Recover, ZeroLoadGivesZero) {
  const auto b = build({3}, ConstraintRecipe::corners, -1, Execution::serial, 0.0);
  const auto& l = b.fine();
  const FetiDpSaddleSystem saddle(l);
  const Vector f = Vector::Zero(l.gamma_size());
  const RecoveredSolution rec = recover_solution(l, Vector::Zero(saddle.size()), f);
  EXPECT_EQ(rec.field.norm(), 0.0);
  EXPECT_EQ(rec.jump_norm, 0.0);
}

TEST_P(Recipes, TriangularPreconditionerBlocksWithExactCoarse) {
  const auto b = build({3}, GetParam());
  const auto& l = b.fine();
  const FetiDpSaddleSystem saddle(l);
  const MfPreconditioner mf(l, exact(b), MfMode::triangular);
  const DenseMatrix a = materialize(saddle.as_operator());
  const DenseMatrix m = materialize(mf.as_operator());
  const DenseMatrix ma = m * a;
  const Index nc = saddle.coarse_size();
  const Index nl = saddle.lambda_size();
  EXPECT_LE(oracle::max_abs(ma.topLeftCorner(nc, nc) - DenseMatrix::Identity(nc, nc)), 1e-10);
  EXPECT_LE(oracle::max_abs(ma.bottomLeftCorner(nl, nc)), 1e-10);
}

TEST(Mf, OneCoarseAndOneDirichletSolvePerApply) {
  const auto b = build({3}, ConstraintRecipe::corners);
  const auto& l = b.fine();
  const auto coarse = exact(b);
  const MfPreconditioner mf(l, coarse, MfMode::triangular);
  const FetiDpSaddleSystem saddle(l);
  coarse->reset_calls();
  mf.dirichlet().reset_calls();
  for (unsigned k = 1; k <= 3; ++k) {
    (void)mf.apply(oracle::random_vector(saddle.size(), k));
    EXPECT_EQ(coarse->calls(), k);
    EXPECT_EQ(mf.dirichlet().calls(), k);
  }
}

TEST(Mf, BlockDiagonalActsBlockwise) {
  const auto b = build({3}, ConstraintRecipe::corners_edges);
  const auto& l = b.fine();
  const auto coarse = exact(b);
  const MfPreconditioner bd(l, coarse, MfMode::block_diagonal);
  const FetiDpSaddleSystem saddle(l);
  const Index nc = saddle.coarse_size();
  const Index nl = saddle.lambda_size();
  Vector r = Vector::Zero(saddle.size());
  r.head(nc) = oracle::random_vector(nc, 5);
  Vector out = bd.apply(r);
  EXPECT_LE((out.head(nc) - coarse->apply(r.head(nc))).norm(), 1e-14);
  EXPECT_EQ(out.tail(nl).norm(), 0.0);

  r.setZero();
  r.tail(nl) = oracle::random_vector(nl, 6);
  out = bd.apply(r);
  EXPECT_EQ(out.head(nc).norm(), 0.0);
  const DirichletPreconditioner md(l);
  EXPECT_LE((out.tail(nl) + md.apply(r.tail(nl))).norm(), 1e-14);
}

TEST_P(Recipes, TwoLevelBddcMatchesOracle) {
  for (const int r : {3, 4}) {
    const auto b = build({r}, GetParam());
    const auto o = oracle::two_level(r * r, r, edges());
    const auto& l = b.fine();
    const BddcPreconditioner bddc(l, default_coarse_solver(b.hierarchy));
    const DenseMatrix m = materialize(bddc.as_operator());
    EXPECT_LE(oracle::max_abs(m - o.M), 1e-10);
    EXPECT_LE(oracle::max_abs(materialize(bddc.h_operator()) - o.H), 1e-10);
    EXPECT_LE(oracle::max_abs(materialize(assembled_schur_operator(l)) - o.Shat), 1e-12);

    // Spectrum of M S: real, bounded below by one.
    const auto ev = oracle::real_eigenvalues(m * o.Shat);
    EXPECT_GE(ev.front(), 1.0 - 1e-9);
  }
}

TEST_P(Recipes, TransferIdentitiesAtTwoLevels) {
  const auto b = build({3}, GetParam());
  const auto o = oracle::two_level(9, 3, edges());
  const auto& l = b.fine();
  const BddcPreconditioner bddc(l, default_coarse_solver(b.hierarchy));
  const DenseMatrix h = materialize(bddc.h_operator());
  const DenseMatrix& s = o.S;
  const DenseMatrix& r = o.R;
  const DenseMatrix& e = o.E;
  const DenseMatrix shat = r.transpose() * s * r;
  const DenseMatrix m = e * h * e.transpose();
  const DenseMatrix f = o.B * h * o.B.transpose();
  const DenseMatrix md = o.BD * s * o.BD.transpose();
  const DenseMatrix tp = o.BD * s * r;
  const DenseMatrix td = e * h * o.B.transpose();

  // H S is the identity on continuous vectors.
  EXPECT_LE(oracle::max_abs(h * s * r - r), 1e-10);
  EXPECT_LE(oracle::max_abs(td * md * f - m * shat * td), 1e-10);
  // The primal transfer identity leaves exactly the term B_D S H E^T R^T S R,
  // which vanishes only if H S B_D^T = B_D^T.
  const DenseMatrix residual = o.BD * s * h * e.transpose() * r.transpose() * s * r;
  EXPECT_LE(oracle::max_abs(tp * m * shat - md * f * tp - residual), 1e-10);
}

TEST(Bddc, DegenerateThreeLevelEqualsTwoLevel) {
  // With n = 9 the second level is a single subdomain, so the level-2 sweep
  // is an exact solve of the coarse problem.
  const auto two = build({3}, ConstraintRecipe::corners);
  testing_support::Built three;
  try {
    three = build({3, 3}, ConstraintRecipe::corners, 9);
  } catch (const Error& err) {
    GTEST_SKIP() << "single-subdomain level not representable: " << err.what();
  }
  const BddcPreconditioner m2(two.fine(), default_coarse_solver(two.hierarchy));
  const BddcPreconditioner m3(three.fine(), default_coarse_solver(three.hierarchy));
  EXPECT_LE(oracle::max_abs(materialize(m2.as_operator()) - materialize(m3.as_operator())), 1e-10);
}

TEST(Bddc, MultilevelPreconditionerIsSymmetricPositive) {
  const auto b = build({3, 3}, ConstraintRecipe::corners);
  const auto& l = b.fine();
  const BddcPreconditioner bddc(l, default_coarse_solver(b.hierarchy));
  EXPECT_LE(symmetry_defect(bddc.as_operator()), 1e-10);
  for (unsigned s = 0; s < 4; ++s) {
    const Vector x = oracle::random_vector(l.gamma_size(), s);
    EXPECT_GT(x.dot(bddc.apply(x)), 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Constraints, Recipes,
                         ::testing::Values(ConstraintRecipe::corners, ConstraintRecipe::corners_edges),
                         [](const ::testing::TestParamInfo<ConstraintRecipe>& info) {
                           return info.param == ConstraintRecipe::corners ? "corners" : "corners_edges";
                         });

TEST(InexactCoarse, StandinCoarseSolverSpectraAgree) {
  const auto b = build({3}, ConstraintRecipe::corners_edges);
  const auto& l = b.fine();
  const auto coarse = std::make_shared<StandinCoarseSolver>(l.coarse.coarse_matrix, 0.7);

  const BddcPreconditioner bddc(l, coarse);
  const LinearOperator shat = assembled_schur_operator(l);
  const SpectrumReport sb = dense_spectrum(compose(bddc.as_operator(), shat));

  const FetiDpSaddleSystem saddle(l);
  const MfPreconditioner mf(l, coarse, MfMode::triangular);
  const SpectrumReport sf = dense_spectrum(compose(mf.as_operator(), saddle.as_operator()));

  const SpectrumMatch match = compare_spectra(sb, sf, 1e-8, 1e-7);
  EXPECT_TRUE(match.matched) << "max deviation " << match.max_deviation;
  EXPECT_FALSE(match.kept_a.empty());

  // GMRES on the saddle system converges with the inexact coarse solve.
  const Vector rhs = saddle.rhs(dd::condensed_rhs(l));
  const KrylovReport rep = gmres_right(saddle.as_operator(), mf.as_operator(), rhs, {1e-10});
  EXPECT_TRUE(rep.converged);
  const RecoveredSolution rec = recover_solution(l, rep.solution, dd::condensed_rhs(l));
  const Vector u = fem::direct_solve(b.problem);
  EXPECT_LE((rec.field - u).norm() / u.norm(), 1e-7);
}

TEST(InexactCoarse, NonsymmetricCoarseRejectedByPcgAcceptedByGmres) {
  const auto b = build({3}, ConstraintRecipe::corners);
  const auto& l = b.fine();
  const DenseMatrix sc = dense(l.coarse.coarse_matrix);
  DenseMatrix skewed = sc.inverse();
  skewed(0, 1) += 0.05 * skewed(0, 0);
  const auto coarse = std::make_shared<OperatorCoarseSolver>(LinearOperator::from_dense(skewed), false, "skewed");
  const BddcPreconditioner bddc(l, coarse);
  const LinearOperator shat = assembled_schur_operator(l);
  const Vector f = dd::condensed_rhs(l);
  try {
    (void)pcg(shat, bddc.as_operator(), f);
    FAIL() << "expected a symmetry error";
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::invalid_argument);
  }
  const KrylovReport rep = gmres_right(shat, bddc.as_operator(), f, {1e-10});
  EXPECT_TRUE(rep.converged);
  const Vector exact_w = DenseMatrix(materialize(shat)).ldlt().solve(f);
  EXPECT_LE((rep.solution - exact_w).norm() / exact_w.norm(), 1e-8);
}

}  // namespace
}  // namespace mlfeti
