// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_DECOMPOSITION_HPP
#define MLFETI_DECOMPOSITION_HPP

#include <compare>
#include <string>
#include <vector>

#include "mlfeti/fem.hpp"
#include "mlfeti/linalg.hpp"

namespace mlfeti::dd {

/// Position in half-element fine-grid units: fine node (i, j) is at (2i, 2j).
/// Edge midpoints of every level land on integer coordinates.
struct Point2 {
  int x = 0;
  int y = 0;
  auto operator<=>(const Point2&) const = default;
};

enum class DofKind { node, corner, edge_average };

/// One element of a level problem. On level 1 this is a Q1 element; on level
/// l > 1 it is a level-(l-1) subdomain carrying its local coarse matrix.
struct LevelElement {
  int ex = 0;
  int ey = 0;
  std::vector<int> dofs;
  DenseMatrix matrix;
  Vector load;
};

/// The problem a decomposition level operates on: dofs with positions and a
/// regular grid of elements.
struct LevelProblem {
  int level = 1;
  int elements_per_side = 0;
  int element_size = 1;  // in fine elements
  std::vector<Point2> positions;
  std::vector<DofKind> kinds;
  std::vector<LevelElement> elements;  // index ex + ey * elements_per_side

  [[nodiscard]] Index dof_count() const { return static_cast<Index>(positions.size()); }
  [[nodiscard]] SparseMatrix assemble() const;
  [[nodiscard]] Vector assemble_load() const;
};

/// Level-1 problem on the free dofs of the fine grid.
LevelProblem fine_level_problem(const fem::AssembledProblem& problem);

/// Geometry of a uniform multilevel decomposition. Level l subdomains are
/// squares of subdomain_size(l) fine elements; level-(l-1) subdomains become
/// level-l elements.
struct DecompositionHierarchy {
  int n = 0;
  std::vector<int> ratios;  // ratios[l-1] = H_l / H_{l-1}, l = 1..L-1

  [[nodiscard]] int levels() const { return static_cast<int>(ratios.size()) + 1; }
  [[nodiscard]] int subdomain_size(int level) const;
  [[nodiscard]] int subdomains_per_side(int level) const { return n / subdomain_size(level); }
  [[nodiscard]] int subdomain_count(int level) const {
    return subdomains_per_side(level) * subdomains_per_side(level);
  }
  /// Subdomain counts per level joined by '/', finest first, e.g. "81/9".
  [[nodiscard]] std::string nsub_string() const;
  [[nodiscard]] long reported_ndof() const { return static_cast<long>(n + 1) * (n + 1); }
};

/// Grid size that leaves ratios.back() top-level subdomains per side.
int default_grid_size(const std::vector<int>& ratios);

/// Throws Error{incompatible_grid} unless every ratio is >= 2 and n is a
/// multiple of the product of the ratios.
DecompositionHierarchy build_hierarchy(const std::vector<int>& ratios, int n);
DecompositionHierarchy build_hierarchy(const std::vector<int>& ratios);

struct Subdomain {
  int sx = 0;
  int sy = 0;
  Point2 lower;  // box corners in position units
  Point2 upper;
  std::vector<int> elements;
  std::vector<int> dofs;            // level dof ids, ascending
  std::vector<int> interior;        // local indices into dofs
  std::vector<int> interface;       // local indices into dofs
  std::vector<int> interface_dofs;  // level dof ids, ascending; ordering of W^i
  Index w_offset = 0;

  [[nodiscard]] Index w_size() const { return static_cast<Index>(interface_dofs.size()); }
};

/// Subdomains of one level and the interior/interface split of its dofs.
struct LevelDecomposition {
  int level = 1;
  int subdomains_per_side = 0;
  std::vector<Subdomain> subdomains;
  std::vector<std::vector<int>> owners;  // ascending subdomain ids per dof
  std::vector<int> multiplicity;
  std::vector<int> interface_dofs;  // Gamma, ascending level dof ids
  std::vector<int> gamma_index;     // level dof -> Gamma index or -1
  Index w_size = 0;

  [[nodiscard]] Index gamma_size() const { return static_cast<Index>(interface_dofs.size()); }
};

/// A dof is interface iff at least two subdomains own it.
LevelDecomposition classify_interface(const LevelProblem& problem,
                                      const DecompositionHierarchy& hierarchy);

/// R, D_P, E = R^T D_P, B and B_D for one level.
struct InterfaceMaps {
  SparseMatrix restriction;  // |W| x |Gamma|
  Vector weights;            // diagonal of D_P, |W|
  SparseMatrix averaging;    // E, |Gamma| x |W|
  SparseMatrix jump;         // B, |Lambda| x |W|
  SparseMatrix scaled_jump;  // B_D, |Lambda| x |W|

  [[nodiscard]] Index lambda_size() const { return jump.rows(); }
  [[nodiscard]] Index w_size() const { return restriction.rows(); }
  [[nodiscard]] Index gamma_size() const { return restriction.cols(); }
};

/// Multiplicity weights and the non-redundant star pattern for B: each
/// non-minimal owner copy is paired with the minimal owner copy.
InterfaceMaps build_interface_maps(const LevelDecomposition& decomposition);

}  // namespace mlfeti::dd

#endif  // MLFETI_DECOMPOSITION_HPP
