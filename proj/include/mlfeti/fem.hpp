// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_FEM_HPP
#define MLFETI_FEM_HPP

#include <array>
#include <vector>

#include "mlfeti/linalg.hpp"

namespace mlfeti::fem {

/// Uniform n x n grid of square Q1 elements on the unit square. Node (i, j)
/// sits at (i h, j h) with 0 <= i, j <= n.
struct StructuredGrid {
  int n = 0;

  [[nodiscard]] double h() const { return 1.0 / n; }
  [[nodiscard]] int nodes_per_side() const { return n + 1; }
  [[nodiscard]] int node_count() const { return (n + 1) * (n + 1); }
  [[nodiscard]] int node_index(int i, int j) const { return j * (n + 1) + i; }
  [[nodiscard]] bool is_boundary(int i, int j) const { return i == 0 || j == 0 || i == n || j == n; }
};

/// Dirichlet/free classification of grid nodes with contiguous free numbering.
struct DofMap {
  std::vector<int> node_to_dof;  // -1 for Dirichlet nodes
  std::vector<int> dof_to_node;

  [[nodiscard]] int free_count() const { return static_cast<int>(dof_to_node.size()); }
  [[nodiscard]] bool is_dirichlet(int node) const { return node_to_dof[node] < 0; }
};

DofMap make_dofmap(const StructuredGrid& grid);

struct AssembledProblem {
  StructuredGrid grid;
  DofMap dofs;
  SparseMatrix stiffness;  // on free dofs
  Vector load;             // on free dofs
  double load_density = 1.0;

  /// All grid nodes, Dirichlet included.
  [[nodiscard]] long reported_ndof() const { return grid.node_count(); }
};

/// Local node order: (0,0), (1,0), (1,1), (0,1).
DenseMatrix q1_element_stiffness();

/// Consistent load of a constant density over one element of size h.
Vector q1_element_load(double h, double density);

/// Global node ids of element (ex, ey) in local order.
std::array<int, 4> element_nodes(const StructuredGrid& grid, int ex, int ey);

/// Zero Dirichlet data on the whole boundary; requires n >= 2.
AssembledProblem assemble_global(const StructuredGrid& grid, double load_density);

/// Half-open element range [x0, x1) x [y0, y1).
struct SubdomainBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
};

struct SubdomainStiffness {
  DenseMatrix stiffness;
  Vector load;
  std::vector<int> local_to_global;  // free dof ids, ascending
};

/// Neumann stiffness of the elements inside the box, restricted to
/// non-Dirichlet nodes.
SubdomainStiffness assemble_subdomain(const AssembledProblem& problem, const SubdomainBox& box);

/// Sparse direct solve of K u = f, used as the reference solution.
Vector direct_solve(const AssembledProblem& problem);

}  // namespace mlfeti::fem

#endif  // MLFETI_FEM_HPP
