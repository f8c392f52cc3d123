// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "mlfeti/decomposition.hpp"
#include "mlfeti/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace mlfeti::dd {
namespace {

using testing_support::dense;

struct Level1 {
  fem::AssembledProblem problem;
  DecompositionHierarchy geometry;
  LevelProblem level;
  LevelDecomposition decomposition;
  InterfaceMaps maps;
};

Level1 level1(std::vector<int> ratios, int n = -1) {
  Level1 l;
  l.geometry = n < 0 ? build_hierarchy(ratios) : build_hierarchy(ratios, n);
  l.problem = fem::assemble_global(fem::StructuredGrid{l.geometry.n}, 1.0);
  l.level = fine_level_problem(l.problem);
  l.decomposition = classify_interface(l.level, l.geometry);
  l.maps = build_interface_maps(l.decomposition);
  return l;
}

TEST(Hierarchy, TableCounts) {
  const auto h2 = build_hierarchy({3});
  EXPECT_EQ(h2.n, 9);
  EXPECT_EQ(h2.nsub_string(), "9");
  EXPECT_EQ(h2.reported_ndof(), 100);
  const auto h3 = build_hierarchy({3, 3});
  EXPECT_EQ(h3.nsub_string(), "81/9");
  EXPECT_EQ(h3.reported_ndof(), 784);
  EXPECT_EQ(build_hierarchy({3, 3, 3, 3}).nsub_string(), "6561/729/81/9");
  EXPECT_EQ(build_hierarchy({3, 3, 3, 3}).reported_ndof(), 59536);
  EXPECT_EQ(build_hierarchy({4, 4, 4}).reported_ndof(), 66049);
  EXPECT_EQ(build_hierarchy({6, 6}).nsub_string(), "1296/36");
  EXPECT_EQ(build_hierarchy({6, 6}).reported_ndof(), 47089);
}

TEST(Hierarchy, IncompatibleGrid) {
  try {
    (void)build_hierarchy({5}, 9);
    FAIL() << "expected an error";
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::incompatible_grid);
  }
  EXPECT_THROW((void)build_hierarchy({1}), Error);
  EXPECT_THROW((void)build_hierarchy({}), Error);
}

TEST(Classification, MultiplicitiesMatchOwnershipScan) {
  const auto l = level1({3});
  const auto o = oracle::two_level(9, 3, false);
  ASSERT_EQ(l.decomposition.multiplicity.size(), o.multiplicity.size());
  EXPECT_EQ(l.decomposition.multiplicity, o.multiplicity);
  EXPECT_EQ(l.decomposition.interface_dofs, o.gamma);
  int crosspoints = 0;
  for (const int m : l.decomposition.multiplicity) crosspoints += m == 4;
  EXPECT_EQ(crosspoints, 4);
  const int dof = l.problem.dofs.node_to_dof[static_cast<std::size_t>(l.problem.grid.node_index(3, 1))];
  EXPECT_EQ(l.decomposition.multiplicity[static_cast<std::size_t>(dof)], 2);
  EXPECT_EQ(l.decomposition.gamma_size(), 28);
}

TEST(InterfaceMaps, NodeBlocksForMultiplicityTwo) {
  const auto l = level1({3});
  const DenseMatrix b = dense(l.maps.jump);
  const DenseMatrix bd = dense(l.maps.scaled_jump);
  // The first interface dof (3,1) lies on a vertical edge shared by two subdomains.
  for (Index row = 0; row < b.rows(); ++row) {
    std::vector<Index> cols;
    for (Index c = 0; c < b.cols(); ++c) {
      if (b(row, c) != 0.0) cols.push_back(c);
    }
    if (cols.size() != 2) continue;
    const Index lo = cols[0];
    const Index hi = cols[1];
    double m = 1.0 / l.maps.weights(lo);
    if (m != 2.0) continue;
    EXPECT_EQ(b(row, lo), 1.0);
    EXPECT_EQ(b(row, hi), -1.0);
    EXPECT_NEAR(bd(row, lo), 0.5, 1e-15);
    EXPECT_NEAR(bd(row, hi), -0.5, 1e-15);
  }
}

TEST(InterfaceMaps, MatchDenseOracle) {
  const auto l = level1({3});
  const auto o = oracle::two_level(9, 3, false);
  EXPECT_EQ(dense(l.maps.restriction), o.R);
  EXPECT_LE(oracle::max_abs(dense(l.maps.averaging) - o.E), 1e-15);
  EXPECT_EQ(dense(l.maps.jump), o.B);
  EXPECT_LE(oracle::max_abs(dense(l.maps.scaled_jump) - o.BD), 1e-13);
}

class Identities : public ::testing::TestWithParam<std::vector<int>> {};

TEST_P(Identities, ProjectionProperties) {
  const auto l = level1(GetParam());
  const DenseMatrix r = dense(l.maps.restriction);
  const DenseMatrix e = dense(l.maps.averaging);
  const DenseMatrix b = dense(l.maps.jump);
  const DenseMatrix bd = dense(l.maps.scaled_jump);
  const Index nw = r.rows();
  const DenseMatrix iw = DenseMatrix::Identity(nw, nw);
  EXPECT_EQ(oracle::max_abs(b * r), 0.0);
  EXPECT_EQ(r.transpose() * r, DenseMatrix((r.transpose() * r).diagonal().asDiagonal()));
  EXPECT_LE(oracle::max_abs(e * r - DenseMatrix::Identity(r.cols(), r.cols())), 1e-14);
  EXPECT_LE(oracle::max_abs(b * bd.transpose() - DenseMatrix::Identity(b.rows(), b.rows())), 1e-13);
  EXPECT_LE(oracle::max_abs(bd.transpose() * b + r * e - iw), 1e-13);
  EXPECT_LE(oracle::max_abs(r * e * bd.transpose()), 1e-13);
  EXPECT_LE(oracle::max_abs(e * bd.transpose() * b), 1e-13);
  const DenseMatrix re = r * e;
  const DenseMatrix bdb = bd.transpose() * b;
  EXPECT_LE(oracle::max_abs(re * re - re), 1e-13);
  EXPECT_LE(oracle::max_abs(bdb * bdb - bdb), 1e-13);
  Eigen::LLT<DenseMatrix> gram(b * b.transpose());
  EXPECT_EQ(gram.info(), Eigen::Success);
  EXPECT_EQ(b.rows(), static_cast<Index>([&] {
              std::size_t count = 0;
              for (const int dof : l.decomposition.interface_dofs) {
                count += static_cast<std::size_t>(l.decomposition.multiplicity[static_cast<std::size_t>(dof)] - 1);
              }
              return count;
            }()));
}

INSTANTIATE_TEST_SUITE_P(Ratios, Identities,
                         ::testing::Values(std::vector<int>{3}, std::vector<int>{4}, std::vector<int>{2, 3}),
                         [](const ::testing::TestParamInfo<std::vector<int>>& info) {
                           std::string name = "ratios";
                           for (const int r : info.param) name += "_" + std::to_string(r);
                           return name;
                         });

TEST(CoarseLevels, LevelTwoClassification) {
  const auto b = testing_support::build({3, 3}, ConstraintRecipe::corners_edges);
  ASSERT_EQ(b.hierarchy->levels.size(), 2u);
  const auto& l2 = b.hierarchy->levels[1];
  EXPECT_EQ(l2.problem.level, 2);
  EXPECT_EQ(l2.problem.elements_per_side, 9);
  EXPECT_EQ(l2.decomposition.subdomains.size(), 9u);
  // Level-2 dofs are level-1 coarse dofs: 8x8 corners + 2*8*9 edges.
  EXPECT_EQ(l2.problem.dof_count(), 64 + 144);
  const DenseMatrix r = dense(l2.maps.restriction);
  const DenseMatrix e = dense(l2.maps.averaging);
  const DenseMatrix bmat = dense(l2.maps.jump);
  const DenseMatrix bd = dense(l2.maps.scaled_jump);
  EXPECT_EQ(oracle::max_abs(bmat * r), 0.0);
  EXPECT_LE(oracle::max_abs(bd.transpose() * bmat + r * e - DenseMatrix::Identity(r.rows(), r.rows())), 1e-13);
}

}  // namespace
}  // namespace mlfeti::dd
