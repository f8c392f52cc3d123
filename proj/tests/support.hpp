// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_TESTS_SUPPORT_HPP
#define MLFETI_TESTS_SUPPORT_HPP

#include <memory>
#include <vector>

#include "mlfeti/fem.hpp"
#include "mlfeti/multilevel.hpp"
#include "mlfeti/preconditioners.hpp"

namespace testing_support {

using namespace mlfeti;

struct Built {
  fem::AssembledProblem problem;
  dd::DecompositionHierarchy geometry;
  std::shared_ptr<const dd::MultilevelHierarchy> hierarchy;

  [[nodiscard]] const dd::SubstructuredLevel& fine() const { return hierarchy->fine(); }
};

inline Built build(const std::vector<int>& ratios, dd::ConstraintRecipe recipe, int n = -1,
                   Execution exec = Execution::serial, double load = 1.0) {
  Built b;
  b.geometry = n < 0 ? dd::build_hierarchy(ratios) : dd::build_hierarchy(ratios, n);
  b.problem = fem::assemble_global(fem::StructuredGrid{b.geometry.n}, load);
  b.hierarchy = std::make_shared<const dd::MultilevelHierarchy>(
      dd::build_multilevel(b.problem, b.geometry, recipe, exec));
  return b;
}

inline DenseMatrix dense(const SparseMatrix& a) { return DenseMatrix(a); }

}  // namespace testing_support

#endif  // MLFETI_TESTS_SUPPORT_HPP
