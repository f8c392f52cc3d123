// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_MULTILEVEL_HPP
#define MLFETI_MULTILEVEL_HPP

#include <functional>
#include <vector>

#include "mlfeti/coarse_space.hpp"
#include "mlfeti/decomposition.hpp"
#include "mlfeti/fem.hpp"
#include "mlfeti/linalg.hpp"
#include "mlfeti/parallel.hpp"

namespace mlfeti::dd {

/// Everything known about one decomposition level.
struct SubstructuredLevel {
  LevelProblem problem;
  LevelDecomposition decomposition;
  InterfaceMaps maps;
  SchurComplementSet schur;
  ConstraintSet constraints;
  CoarseSpace coarse;

  [[nodiscard]] Index w_size() const { return decomposition.w_size; }
  [[nodiscard]] Index gamma_size() const { return decomposition.gamma_size(); }
  [[nodiscard]] Index coarse_size() const { return coarse.size(); }
  [[nodiscard]] Index lambda_size() const { return maps.lambda_size(); }
};

SubstructuredLevel substructure(LevelProblem problem, const DecompositionHierarchy& hierarchy,
                                ConstraintRecipe recipe, Execution exec = Execution::serial);

/// Levels 1..L-1 plus the level-L problem, which is solved exactly.
struct MultilevelHierarchy {
  DecompositionHierarchy geometry;
  ConstraintRecipe recipe = ConstraintRecipe::corners;
  std::vector<SubstructuredLevel> levels;
  LevelProblem top;
  SpdFactorization top_factor;

  [[nodiscard]] const SubstructuredLevel& fine() const { return levels.front(); }
};

MultilevelHierarchy build_multilevel(const fem::AssembledProblem& problem,
                                     const DecompositionHierarchy& geometry, ConstraintRecipe recipe,
                                     Execution exec = Execution::serial);

// Level operators. W vectors are concatenations of the subdomain blocks W^i
// in subdomain order; Gamma vectors follow LevelDecomposition::interface_dofs.

/// S w, blockwise.
Vector apply_schur(const SubstructuredLevel& level, const Vector& w, Execution exec = Execution::serial);

/// R^T S R x.
Vector apply_assembled_schur(const SubstructuredLevel& level, const Vector& x,
                             Execution exec = Execution::serial);

/// First block of [[S, C^T], [C, 0]]^{-1} [g; 0], blockwise.
Vector apply_sdelta_inv(const SubstructuredLevel& level, const Vector& g,
                        Execution exec = Execution::serial);

/// Psi u_c.
Vector apply_basis(const SubstructuredLevel& level, const Vector& uc, Execution exec = Execution::serial);

/// Psi^T w.
Vector apply_basis_transpose(const SubstructuredLevel& level, const Vector& w,
                             Execution exec = Execution::serial);

/// f_Gamma = R^T g with g the statically condensed subdomain loads.
Vector condensed_rhs(const SubstructuredLevel& level);

/// Interior values of every subdomain from interface values w (on Gamma) and
/// the level load: u_I = K_II^{-1} (f_I - K_IG w). Returns a level-dof vector.
Vector recover_interiors(const SubstructuredLevel& level, const Vector& w_gamma);

/// Interface BDDC step E (Psi coarse(Psi^T E^T r) + S_Delta^{-1} E^T r).
using CoarseApply = std::function<Vector(const Vector&)>;
Vector interface_bddc(const SubstructuredLevel& level, const Vector& r_gamma, const CoarseApply& coarse,
                      Execution exec = Execution::serial);

/// One multilevel BDDC sweep for the full level-`index` problem (index >= 1
/// in MultilevelHierarchy::levels): interior pre-correction, interface BDDC
/// with recursion on the coarse problem, interior post-correction.
Vector apply_level(const MultilevelHierarchy& h, std::size_t index, const Vector& r,
                   Execution exec = Execution::serial);

/// Multilevel approximation of S_c^{-1} for the level-1 coarse matrix; the
/// exact top solve when L = 2.
Vector apply_multilevel_coarse(const MultilevelHierarchy& h, const Vector& rc,
                               Execution exec = Execution::serial);

}  // namespace mlfeti::dd

#endif  // MLFETI_MULTILEVEL_HPP
