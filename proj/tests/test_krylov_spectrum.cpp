// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "mlfeti/error.hpp"
#include "mlfeti/krylov.hpp"
#include "mlfeti/spectrum.hpp"
#include "oracles.hpp"

namespace mlfeti {
namespace {

DenseMatrix laplace_1d(Index n) {
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -1.0;
  }
  return a;
}

TEST(Pcg, SolvesSpdSystem) {
  const DenseMatrix a = laplace_1d(40);
  const Vector b = oracle::random_vector(40, 1);
  const auto rep = pcg(LinearOperator::from_dense(a), LinearOperator::identity(40), b, {1e-10});
  ASSERT_TRUE(rep.converged);
  EXPECT_LE((a * rep.solution - b).norm() / b.norm(), 1e-9);
  EXPECT_EQ(rep.residual_history.front(), 1.0);
  EXPECT_EQ(static_cast<Index>(rep.residual_history.size()), rep.iterations + 1);
  EXPECT_LE(rep.iterations, 40);
}

TEST(Pcg, ExactPreconditionerConvergesInOneStep) {
  const DenseMatrix a = laplace_1d(15);
  const Vector b = oracle::random_vector(15, 2);
  const auto rep = pcg(LinearOperator::from_dense(a), LinearOperator::from_dense(a.inverse()), b);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.iterations, 1);
}

TEST(Pcg, ZeroRightHandSide) {
  const auto rep = pcg(LinearOperator::identity(4), LinearOperator::identity(4), Vector::Zero(4));
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.iterations, 0);
  EXPECT_EQ(rep.solution.norm(), 0.0);
}

TEST(Pcg, RejectsNonsymmetricOperator) {
  DenseMatrix a = laplace_1d(6);
  a(0, 1) = -0.5;
  try {
    (void)pcg(LinearOperator::from_dense(a), LinearOperator::identity(6), Vector::Ones(6));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::invalid_argument);
  }
}

TEST(Pcg, IndefiniteOperatorBreaksDown) {
  DenseMatrix a = DenseMatrix::Identity(3, 3);
  a(1, 1) = -1.0;
  Vector b(3);
  b << 0.0, 1.0, 0.0;
  EXPECT_THROW((void)pcg(LinearOperator::from_dense(a), LinearOperator::identity(3), b), Error);
}

TEST(Pcg, IterationCapReportsNoConvergence) {
  const DenseMatrix a = laplace_1d(50);
  KrylovOptions opt;
  opt.max_iterations = 3;
  opt.tol = 1e-12;
  try {
    (void)pcg(LinearOperator::from_dense(a), LinearOperator::identity(50), Vector::Ones(50), opt);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::no_convergence);
  }
}

TEST(Gmres, SolvesNonsymmetricSystem) {
  DenseMatrix a = laplace_1d(30);
  for (Index i = 0; i + 1 < 30; ++i) a(i, i + 1) = -0.3;
  const Vector b = oracle::random_vector(30, 3);
  const DenseMatrix p = a.diagonal().cwiseInverse().asDiagonal();
  const auto rep = gmres_right(LinearOperator::from_dense(a), LinearOperator::from_dense(p), b, {1e-12});
  ASSERT_TRUE(rep.converged);
  EXPECT_LE((a * rep.solution - b).norm() / b.norm(), 1e-10);
  for (std::size_t i = 1; i < rep.residual_history.size(); ++i) {
    EXPECT_LE(rep.residual_history[i], rep.residual_history[i - 1] * (1 + 1e-12));
  }
}

TEST(Gmres, FinishesWithinDimensionOnDistinctEigenvalues) {
  Vector d(5);
  d << 1, 2, 3, 4, 5;
  const DenseMatrix a = d.asDiagonal();
  const auto rep = gmres_right(LinearOperator::from_dense(a), LinearOperator::identity(5), Vector::Ones(5));
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.iterations, 5);
}

TEST(Gmres, SymmetricSystemMatchesPcgIterations) {
  const DenseMatrix a = laplace_1d(25);
  const Vector b = oracle::random_vector(25, 4);
  const auto op = LinearOperator::from_dense(a);
  const auto g = gmres_right(op, LinearOperator::identity(25), b, {1e-8});
  const auto c = pcg(op, LinearOperator::identity(25), b, {1e-8});
  EXPECT_LE(std::abs(static_cast<long>(g.iterations) - static_cast<long>(c.iterations)), 2);
}

TEST(Spectrum, DenseSpectrumSortedByMagnitude) {
  DenseMatrix a(3, 3);
  a << 2, 0, 0, 0, -5, 0, 0, 0, 1;
  const auto rep = dense_spectrum(LinearOperator::from_dense(a));
  ASSERT_EQ(rep.eigenvalues.size(), 3u);
  EXPECT_NEAR(rep.eigenvalues[0].real(), -5.0, 1e-14);
  EXPECT_NEAR(rep.eigenvalues[1].real(), 2.0, 1e-14);
  EXPECT_NEAR(rep.eigenvalues[2].real(), 1.0, 1e-14);
  EXPECT_EQ(dense_spectrum(LinearOperator::from_dense(a), 2).eigenvalues.size(), 2u);
}

TEST(Spectrum, RotationHasComplexPair) {
  DenseMatrix a(2, 2);
  a << 0, -1, 1, 0;
  const auto rep = dense_spectrum(LinearOperator::from_dense(a));
  EXPECT_NEAR(std::abs(rep.eigenvalues[0].imag()), 1.0, 1e-14);
  EXPECT_NEAR(rep.eigenvalues[0].imag(), -rep.eigenvalues[1].imag(), 1e-14);
}

TEST(Spectrum, ArnoldiMatchesDenseTopValues) {
  const Index n = 120;
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = 1.0 + 0.5 * static_cast<double>(i) + 0.01 * std::sin(double(i));
  const DenseMatrix q = Eigen::HouseholderQR<DenseMatrix>(DenseMatrix::NullaryExpr(n, n, [](Index i, Index j) {
                          return std::sin(double(i * 131 + j * 17));
                        })).householderQ();
  const DenseMatrix a = q * d.asDiagonal() * q.transpose();
  const auto op = LinearOperator::from_dense(a);
  const auto top = arnoldi_topk(op, 3);
  const auto all = dense_spectrum(op);
  ASSERT_EQ(top.eigenvalues.size(), 3u);
  EXPECT_EQ(top.method, SpectrumMethod::arnoldi);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(top.eigenvalues[i].real(), all.eigenvalues[i].real(), 1e-8);
  }
}

TEST(Spectrum, CompareDropsZerosAndOnes) {
  SpectrumReport a;
  SpectrumReport b;
  a.eigenvalues = {{3.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {0.0, 0.0}};
  b.eigenvalues = {{2.0, 0.0}, {3.0 + 1e-12, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1e-14, 0.0}};
  sort_by_magnitude(a.eigenvalues);
  sort_by_magnitude(b.eigenvalues);
  const auto m = compare_spectra(a, b, 1e-8, 1e-9);
  EXPECT_TRUE(m.matched);
  EXPECT_EQ(m.kept_a.size(), 2u);
  EXPECT_EQ(m.kept_b.size(), 2u);

  b.eigenvalues = {{2.5, 0.0}, {3.0, 0.0}};
  EXPECT_FALSE(compare_spectra(a, b, 1e-8, 1e-9).matched);
}

}  // namespace
}  // namespace mlfeti
