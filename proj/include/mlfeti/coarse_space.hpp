// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_COARSE_SPACE_HPP
#define MLFETI_COARSE_SPACE_HPP

#include <vector>

#include "mlfeti/decomposition.hpp"
#include "mlfeti/linalg.hpp"
#include "mlfeti/parallel.hpp"

namespace mlfeti::dd {

/// Static condensation of one subdomain: S = K_GG - K_GI K_II^{-1} K_IG.
struct SubdomainSchur {
  DenseMatrix stiffness;         // full local matrix over Subdomain::dofs
  Vector load;                   // local load share over Subdomain::dofs
  DenseMatrix schur;             // over Subdomain::interface_dofs
  DenseMatrix interface_interior;  // K_GI
  SpdFactorization interior;     // of K_II
};

struct SchurComplementSet {
  std::vector<SubdomainSchur> subdomains;
};

/// Throws Error{singular_interior} if some K_II is not SPD.
SchurComplementSet compute_schur_complements(const LevelProblem& problem,
                                             const LevelDecomposition& decomposition,
                                             Execution exec = Execution::serial);

enum class ConstraintRecipe { corners, corners_edges };
enum class ConstraintKind { corner, edge_average };

/// One local constraint row of C^i; `coarse_value` is the matching entry of
/// R_c.
struct ConstraintRow {
  int subdomain = 0;
  std::vector<Index> columns;  // indices into W^i
  std::vector<double> coefficients;
  double coarse_value = 1.0;
};

/// A global coarse dof together with the subdomain rows that define it.
struct CoarseDofSpec {
  ConstraintKind kind = ConstraintKind::corner;
  Point2 anchor;
  std::vector<ConstraintRow> rows;
};

/// Interface dofs sitting on interior subdomain vertices.
std::vector<CoarseDofSpec> select_corners(const LevelProblem& problem,
                                          const LevelDecomposition& decomposition);

/// One arithmetic average per interior subdomain edge over the interface
/// dofs strictly between its endpoints. Edges without such dofs are skipped.
std::vector<CoarseDofSpec> build_edge_averages(const LevelProblem& problem,
                                               const LevelDecomposition& decomposition);

/// C (blockwise) and R_c for one level.
struct ConstraintSet {
  std::vector<DenseMatrix> local;             // C^i, rows x |W^i|
  std::vector<std::vector<int>> coarse_ids;   // per subdomain, per row
  std::vector<std::vector<double>> coarse_values;
  std::vector<Point2> coarse_positions;
  std::vector<ConstraintKind> coarse_kinds;

  [[nodiscard]] Index coarse_size() const { return static_cast<Index>(coarse_positions.size()); }
  [[nodiscard]] Index row_count() const;
  /// Global C: |X| x |W|, rows ordered subdomain by subdomain.
  [[nodiscard]] SparseMatrix matrix(const LevelDecomposition& decomposition) const;
  /// R_c: |X| x |U_c|.
  [[nodiscard]] SparseMatrix coarse_map() const;
};

ConstraintSet make_constraint_set(const LevelDecomposition& decomposition,
                                  const std::vector<CoarseDofSpec>& specs);

ConstraintSet build_constraints(const LevelProblem& problem, const LevelDecomposition& decomposition,
                                ConstraintRecipe recipe);

struct SubdomainCoarse {
  SymIndefFactorization saddle;  // [[S, C^T], [C, 0]]
  DenseMatrix basis;             // Psi^i, |W^i| x rows
  DenseMatrix coarse_matrix;     // Psi^i^T S^i Psi^i
};

/// Energy-minimal coarse basis and the coarse matrix of one level.
struct CoarseSpace {
  std::vector<SubdomainCoarse> subdomains;
  SparseMatrix coarse_matrix;  // S_c assembled

  [[nodiscard]] Index size() const { return coarse_matrix.rows(); }
};

/// Solves [[S, C^T], [C, 0]] [Psi; Lambda] = [0; R_c] subdomain by
/// subdomain. Errors from the saddle factorization carry the subdomain index.
CoarseSpace compute_coarse_basis(const SchurComplementSet& schur, const ConstraintSet& constraints,
                                 Execution exec = Execution::serial);

/// The next level's problem: level dofs are this level's coarse dofs and each
/// subdomain becomes an element carrying its local coarse matrix.
LevelProblem coarse_level_problem(const LevelProblem& problem, const LevelDecomposition& decomposition,
                                  const ConstraintSet& constraints, const CoarseSpace& coarse,
                                  int ratio);

}  // namespace mlfeti::dd

#endif  // MLFETI_COARSE_SPACE_HPP
