// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/fem.hpp"

#include <algorithm>
#include <array>

#include "mlfeti/error.hpp"

namespace mlfeti::fem {

DofMap make_dofmap(const StructuredGrid& grid) {
  DofMap map;
  map.node_to_dof.assign(grid.node_count(), -1);
  for (int j = 0; j <= grid.n; ++j) {
    for (int i = 0; i <= grid.n; ++i) {
      if (grid.is_boundary(i, j)) continue;
      const int node = grid.node_index(i, j);
      map.node_to_dof[node] = map.free_count();
      map.dof_to_node.push_back(node);
    }
  }
  return map;
}

DenseMatrix q1_element_stiffness() {
  // Bilinear Laplace stiffness on a square; independent of h in 2D.
  DenseMatrix k(4, 4);
  k << 4, -1, -2, -1,
      -1, 4, -1, -2,
      -2, -1, 4, -1,
      -1, -2, -1, 4;
  return k / 6.0;
}

Vector q1_element_load(double h, double density) {
  return Vector::Constant(4, density * h * h / 4.0);
}

std::array<int, 4> element_nodes(const StructuredGrid& grid, int ex, int ey) {
  return {grid.node_index(ex, ey), grid.node_index(ex + 1, ey), grid.node_index(ex + 1, ey + 1),
          grid.node_index(ex, ey + 1)};
}

AssembledProblem assemble_global(const StructuredGrid& grid, double load_density) {
  if (grid.n < 2) throw Error(ErrorKind::invalid_argument, "grid needs n >= 2");
  AssembledProblem p{grid, make_dofmap(grid), {}, {}, load_density};
  const DenseMatrix ke = q1_element_stiffness();
  const Vector fe = q1_element_load(grid.h(), load_density);
  const int nfree = p.dofs.free_count();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(grid.n) * grid.n * 16);
  p.load = Vector::Zero(nfree);
  for (int ey = 0; ey < grid.n; ++ey) {
    for (int ex = 0; ex < grid.n; ++ex) {
      const auto nodes = element_nodes(grid, ex, ey);
      for (int a = 0; a < 4; ++a) {
        const int da = p.dofs.node_to_dof[nodes[a]];
        if (da < 0) continue;
        p.load(da) += fe(a);
        for (int b = 0; b < 4; ++b) {
          const int db = p.dofs.node_to_dof[nodes[b]];
          if (db >= 0) triplets.emplace_back(da, db, ke(a, b));
        }
      }
    }
  }
  p.stiffness = sparse_from_triplets(nfree, nfree, triplets);
  return p;
}

SubdomainStiffness assemble_subdomain(const AssembledProblem& problem, const SubdomainBox& box) {
  const auto& grid = problem.grid;
  if (box.x0 < 0 || box.y0 < 0 || box.x1 > grid.n || box.y1 > grid.n || box.x0 >= box.x1 ||
      box.y0 >= box.y1) {
    throw Error(ErrorKind::invalid_argument, "subdomain box outside the grid");
  }
  SubdomainStiffness out;
  for (int j = box.y0; j <= box.y1; ++j) {
    for (int i = box.x0; i <= box.x1; ++i) {
      const int dof = problem.dofs.node_to_dof[grid.node_index(i, j)];
      if (dof >= 0) out.local_to_global.push_back(dof);
    }
  }
  std::sort(out.local_to_global.begin(), out.local_to_global.end());
  const auto local_of = [&](int dof) {
    return static_cast<int>(std::lower_bound(out.local_to_global.begin(), out.local_to_global.end(), dof) -
                            out.local_to_global.begin());
  };
  const auto n_local = static_cast<Index>(out.local_to_global.size());
  out.stiffness = DenseMatrix::Zero(n_local, n_local);
  out.load = Vector::Zero(n_local);
  const DenseMatrix ke = q1_element_stiffness();
  const Vector fe = q1_element_load(grid.h(), problem.load_density);
  for (int ey = box.y0; ey < box.y1; ++ey) {
    for (int ex = box.x0; ex < box.x1; ++ex) {
      const auto nodes = element_nodes(grid, ex, ey);
      std::array<int, 4> local{};
      for (int a = 0; a < 4; ++a) {
        const int dof = problem.dofs.node_to_dof[nodes[a]];
        local[a] = dof < 0 ? -1 : local_of(dof);
      }
      for (int a = 0; a < 4; ++a) {
        if (local[a] < 0) continue;
        out.load(local[a]) += fe(a);
        for (int b = 0; b < 4; ++b) {
          if (local[b] >= 0) out.stiffness(local[a], local[b]) += ke(a, b);
        }
      }
    }
  }
  return out;
}

Vector direct_solve(const AssembledProblem& problem) {
  return SparseSpdFactorization(problem.stiffness).solve(problem.load);
}

}  // namespace mlfeti::fem
