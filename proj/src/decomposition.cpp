// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/decomposition.hpp"

#include <algorithm>
#include <numeric>

#include "mlfeti/error.hpp"

namespace mlfeti::dd {

SparseMatrix LevelProblem::assemble() const {
  std::vector<Triplet> triplets;
  for (const auto& el : elements) {
    const auto n = el.dofs.size();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        triplets.emplace_back(el.dofs[a], el.dofs[b],
                              el.matrix(static_cast<Index>(a), static_cast<Index>(b)));
      }
    }
  }
  return sparse_from_triplets(dof_count(), dof_count(), triplets);
}

Vector LevelProblem::assemble_load() const {
  Vector f = Vector::Zero(dof_count());
  for (const auto& el : elements) {
    if (el.load.size() == 0) continue;
    for (std::size_t a = 0; a < el.dofs.size(); ++a) f(el.dofs[a]) += el.load(static_cast<Index>(a));
  }
  return f;
}

LevelProblem fine_level_problem(const fem::AssembledProblem& problem) {
  const auto& grid = problem.grid;
  LevelProblem level;
  level.level = 1;
  level.elements_per_side = grid.n;
  level.element_size = 1;
  level.positions.reserve(problem.dofs.dof_to_node.size());
  for (const int node : problem.dofs.dof_to_node) {
    const int i = node % grid.nodes_per_side();
    const int j = node / grid.nodes_per_side();
    level.positions.push_back({2 * i, 2 * j});
  }
  level.kinds.assign(level.positions.size(), DofKind::node);

  const DenseMatrix ke = fem::q1_element_stiffness();
  const Vector fe = fem::q1_element_load(grid.h(), problem.load_density);
  level.elements.reserve(static_cast<std::size_t>(grid.n) * grid.n);
  for (int ey = 0; ey < grid.n; ++ey) {
    for (int ex = 0; ex < grid.n; ++ex) {
      const auto nodes = fem::element_nodes(grid, ex, ey);
      std::vector<int> keep;
      LevelElement el{ex, ey, {}, {}, {}};
      for (int a = 0; a < 4; ++a) {
        const int dof = problem.dofs.node_to_dof[nodes[a]];
        if (dof < 0) continue;
        keep.push_back(a);
        el.dofs.push_back(dof);
      }
      const auto k = static_cast<Index>(keep.size());
      el.matrix.resize(k, k);
      el.load.resize(k);
      for (Index a = 0; a < k; ++a) {
        el.load(a) = fe(keep[a]);
        for (Index b = 0; b < k; ++b) el.matrix(a, b) = ke(keep[a], keep[b]);
      }
      level.elements.push_back(std::move(el));
    }
  }
  return level;
}

int DecompositionHierarchy::subdomain_size(int level) const {
  int size = 1;
  for (int l = 0; l < level; ++l) size *= ratios.at(static_cast<std::size_t>(l));
  return size;
}

std::string DecompositionHierarchy::nsub_string() const {
  std::string out;
  for (int l = 1; l < levels(); ++l) {
    if (!out.empty()) out += '/';
    out += std::to_string(subdomain_count(l));
  }
  return out;
}

int default_grid_size(const std::vector<int>& ratios) {
  if (ratios.empty()) throw Error(ErrorKind::incompatible_grid, "at least one ratio is required");
  return std::accumulate(ratios.begin(), ratios.end(), 1, std::multiplies<>()) * ratios.back();
}

DecompositionHierarchy build_hierarchy(const std::vector<int>& ratios, int n) {
  if (ratios.empty()) throw Error(ErrorKind::incompatible_grid, "at least one ratio is required");
  for (const int r : ratios) {
    if (r < 2) throw Error(ErrorKind::incompatible_grid, "coarsening ratios must be >= 2");
  }
  const int product = std::accumulate(ratios.begin(), ratios.end(), 1, std::multiplies<>());
  if (n < 2 || n % product != 0) {
    throw Error(ErrorKind::incompatible_grid, "grid with " + std::to_string(n) +
                                                  " elements per side is not divisible by " +
                                                  std::to_string(product));
  }
  return {n, ratios};
}

DecompositionHierarchy build_hierarchy(const std::vector<int>& ratios) {
  return build_hierarchy(ratios, default_grid_size(ratios));
}

LevelDecomposition classify_interface(const LevelProblem& problem,
                                      const DecompositionHierarchy& hierarchy) {
  const int level = problem.level;
  if (level < 1 || level >= hierarchy.levels()) {
    throw Error(ErrorKind::invalid_argument, "no decomposition on level " + std::to_string(level));
  }
  const int ratio = hierarchy.ratios[static_cast<std::size_t>(level - 1)];
  if (problem.elements_per_side * problem.element_size != hierarchy.n ||
      problem.elements_per_side % ratio != 0) {
    throw Error(ErrorKind::incompatible_grid, "level problem does not match the hierarchy");
  }

  LevelDecomposition d;
  d.level = level;
  d.subdomains_per_side = problem.elements_per_side / ratio;
  const int side = d.subdomains_per_side;
  const int span = 2 * hierarchy.subdomain_size(level);
  d.subdomains.resize(static_cast<std::size_t>(side) * side);
  for (int sy = 0; sy < side; ++sy) {
    for (int sx = 0; sx < side; ++sx) {
      auto& s = d.subdomains[static_cast<std::size_t>(sy * side + sx)];
      s.sx = sx;
      s.sy = sy;
      s.lower = {sx * span, sy * span};
      s.upper = {(sx + 1) * span, (sy + 1) * span};
    }
  }
  for (std::size_t e = 0; e < problem.elements.size(); ++e) {
    const auto& el = problem.elements[e];
    const int s = (el.ey / ratio) * side + el.ex / ratio;
    d.subdomains[static_cast<std::size_t>(s)].elements.push_back(static_cast<int>(e));
  }

  const auto ndof = static_cast<std::size_t>(problem.dof_count());
  d.owners.assign(ndof, {});
  for (std::size_t s = 0; s < d.subdomains.size(); ++s) {
    auto& sub = d.subdomains[s];
    for (const int e : sub.elements) {
      const auto& dofs = problem.elements[static_cast<std::size_t>(e)].dofs;
      sub.dofs.insert(sub.dofs.end(), dofs.begin(), dofs.end());
    }
    std::sort(sub.dofs.begin(), sub.dofs.end());
    sub.dofs.erase(std::unique(sub.dofs.begin(), sub.dofs.end()), sub.dofs.end());
    for (const int dof : sub.dofs) d.owners[static_cast<std::size_t>(dof)].push_back(static_cast<int>(s));
  }

  d.multiplicity.resize(ndof);
  d.gamma_index.assign(ndof, -1);
  for (std::size_t dof = 0; dof < ndof; ++dof) {
    d.multiplicity[dof] = static_cast<int>(d.owners[dof].size());
    if (d.multiplicity[dof] >= 2) {
      d.gamma_index[dof] = static_cast<int>(d.interface_dofs.size());
      d.interface_dofs.push_back(static_cast<int>(dof));
    }
  }

  Index offset = 0;
  for (auto& sub : d.subdomains) {
    for (std::size_t k = 0; k < sub.dofs.size(); ++k) {
      if (d.multiplicity[static_cast<std::size_t>(sub.dofs[k])] >= 2) {
        sub.interface.push_back(static_cast<int>(k));
        sub.interface_dofs.push_back(sub.dofs[k]);
      } else {
        sub.interior.push_back(static_cast<int>(k));
      }
    }
    sub.w_offset = offset;
    offset += sub.w_size();
  }
  d.w_size = offset;
  return d;
}

namespace {

// Position of dof in subdomain s's W block.
Index w_position(const LevelDecomposition& d, int s, int dof) {
  const auto& sub = d.subdomains[static_cast<std::size_t>(s)];
  const auto it = std::lower_bound(sub.interface_dofs.begin(), sub.interface_dofs.end(), dof);
  return sub.w_offset + static_cast<Index>(it - sub.interface_dofs.begin());
}

}  // namespace

InterfaceMaps build_interface_maps(const LevelDecomposition& d) {
  InterfaceMaps maps;
  const Index nw = d.w_size;
  const Index ng = d.gamma_size();
  maps.weights.resize(nw);

  std::vector<Triplet> r_entries;
  std::vector<Triplet> e_entries;
  r_entries.reserve(static_cast<std::size_t>(nw));
  for (const auto& sub : d.subdomains) {
    for (Index k = 0; k < sub.w_size(); ++k) {
      const int dof = sub.interface_dofs[static_cast<std::size_t>(k)];
      const int g = d.gamma_index[static_cast<std::size_t>(dof)];
      const double w = 1.0 / d.multiplicity[static_cast<std::size_t>(dof)];
      maps.weights(sub.w_offset + k) = w;
      r_entries.emplace_back(sub.w_offset + k, g, 1.0);
      e_entries.emplace_back(g, sub.w_offset + k, w);
    }
  }
  maps.restriction = sparse_from_triplets(nw, ng, r_entries);
  maps.averaging = sparse_from_triplets(ng, nw, e_entries);

  std::vector<Triplet> b_entries;
  std::vector<Triplet> bd_entries;
  Index row = 0;
  for (const int dof : d.interface_dofs) {
    const auto& owners = d.owners[static_cast<std::size_t>(dof)];
    const auto m = static_cast<Index>(owners.size());
    std::vector<Index> copies;
    for (const int s : owners) copies.push_back(w_position(d, s, dof));

    DenseMatrix bn = DenseMatrix::Zero(m - 1, m);
    for (Index k = 1; k < m; ++k) {
      bn(k - 1, 0) = 1.0;
      bn(k - 1, k) = -1.0;
    }
    // B_D^T block = (I - e d^T) B_n^T (B_n B_n^T)^{-1}.
    const Vector weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
    const DenseMatrix projector =
        DenseMatrix::Identity(m, m) - Vector::Ones(m) * weights.transpose();
    Eigen::LLT<DenseMatrix> gram(bn * bn.transpose());
    if (gram.info() != Eigen::Success) {
      throw Error(ErrorKind::construction_failed,
                  "singular nodewise jump system at level dof " + std::to_string(dof));
    }
    const DenseMatrix bd_t = projector * gram.solve(bn).transpose();

    for (Index k = 0; k < m - 1; ++k) {
      for (Index c = 0; c < m; ++c) {
        if (bn(k, c) != 0.0) b_entries.emplace_back(row + k, copies[static_cast<std::size_t>(c)], bn(k, c));
        if (bd_t(c, k) != 0.0) {
          bd_entries.emplace_back(row + k, copies[static_cast<std::size_t>(c)], bd_t(c, k));
        }
      }
    }
    row += m - 1;
  }
  maps.jump = sparse_from_triplets(row, nw, b_entries);
  maps.scaled_jump = sparse_from_triplets(row, nw, bd_entries);
  return maps;
}

}  // namespace mlfeti::dd
