// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/coarse_space.hpp"

#include <algorithm>
#include <map>

#include "mlfeti/error.hpp"

namespace mlfeti::dd {

namespace {

Index local_index(const std::vector<int>& sorted, int dof) {
  return static_cast<Index>(std::lower_bound(sorted.begin(), sorted.end(), dof) - sorted.begin());
}

}  // namespace

SchurComplementSet compute_schur_complements(const LevelProblem& problem,
                                             const LevelDecomposition& decomposition,
                                             Execution exec) {
  SchurComplementSet set;
  set.subdomains.resize(decomposition.subdomains.size());
  for_each_index(exec, decomposition.subdomains.size(), [&](std::size_t s) {
    const auto& sub = decomposition.subdomains[s];
    auto& out = set.subdomains[s];
    const auto n = static_cast<Index>(sub.dofs.size());
    out.stiffness = DenseMatrix::Zero(n, n);
    out.load = Vector::Zero(n);
    for (const int e : sub.elements) {
      const auto& el = problem.elements[static_cast<std::size_t>(e)];
      std::vector<Index> loc;
      loc.reserve(el.dofs.size());
      for (const int dof : el.dofs) loc.push_back(local_index(sub.dofs, dof));
      for (std::size_t a = 0; a < loc.size(); ++a) {
        if (el.load.size() > 0) out.load(loc[a]) += el.load(static_cast<Index>(a));
        for (std::size_t b = 0; b < loc.size(); ++b) {
          out.stiffness(loc[a], loc[b]) += el.matrix(static_cast<Index>(a), static_cast<Index>(b));
        }
      }
    }
    const DenseMatrix k_gg = out.stiffness(sub.interface, sub.interface);
    if (sub.interior.empty()) {
      out.schur = k_gg;
      out.interface_interior = DenseMatrix::Zero(k_gg.rows(), 0);
      return;
    }
    const DenseMatrix k_ii = out.stiffness(sub.interior, sub.interior);
    out.interface_interior = out.stiffness(sub.interface, sub.interior);
    try {
      out.interior = cholesky_factor(k_ii);
    } catch (const Error& err) {
      throw Error(ErrorKind::singular_interior,
                  "subdomain " + std::to_string(s) + " interior block: " + err.detail());
    }
    out.schur = k_gg - out.interface_interior * out.interior.solve(DenseMatrix(out.interface_interior.transpose()));
    out.schur = 0.5 * (out.schur + out.schur.transpose()).eval();
  });
  return set;
}

namespace {

std::map<Point2, int> interface_positions(const LevelProblem& problem,
                                          const LevelDecomposition& decomposition) {
  std::map<Point2, int> at;
  for (const int dof : decomposition.interface_dofs) {
    at.emplace(problem.positions[static_cast<std::size_t>(dof)], dof);
  }
  return at;
}

}  // namespace

std::vector<CoarseDofSpec> select_corners(const LevelProblem& problem,
                                          const LevelDecomposition& decomposition) {
  const auto at = interface_positions(problem, decomposition);
  const int side = decomposition.subdomains_per_side;
  const auto& first = decomposition.subdomains.front();
  const int span = first.upper.x - first.lower.x;
  std::vector<CoarseDofSpec> corners;
  for (int vy = 1; vy < side; ++vy) {
    for (int vx = 1; vx < side; ++vx) {
      const Point2 anchor{vx * span, vy * span};
      const auto it = at.find(anchor);
      if (it == at.end()) continue;
      CoarseDofSpec spec{ConstraintKind::corner, anchor, {}};
      for (const int s : decomposition.owners[static_cast<std::size_t>(it->second)]) {
        const auto& sub = decomposition.subdomains[static_cast<std::size_t>(s)];
        spec.rows.push_back({s, {local_index(sub.interface_dofs, it->second)}, {1.0}, 1.0});
      }
      corners.push_back(std::move(spec));
    }
  }
  return corners;
}

std::vector<CoarseDofSpec> build_edge_averages(const LevelProblem& problem,
                                               const LevelDecomposition& decomposition) {
  const int side = decomposition.subdomains_per_side;
  std::vector<CoarseDofSpec> edges;

  // Dofs of subdomain `a` on its shared edge with `b`, strictly inside.
  const auto add_edge = [&](int a, int b, bool vertical) {
    const auto& sa = decomposition.subdomains[static_cast<std::size_t>(a)];
    const auto& sb = decomposition.subdomains[static_cast<std::size_t>(b)];
    std::vector<int> dofs;
    for (const int dof : sa.interface_dofs) {
      const Point2 p = problem.positions[static_cast<std::size_t>(dof)];
      const bool on_edge = vertical ? (p.x == sa.upper.x && p.y > sa.lower.y && p.y < sa.upper.y)
                                    : (p.y == sa.upper.y && p.x > sa.lower.x && p.x < sa.upper.x);
      if (on_edge) dofs.push_back(dof);
    }
    if (dofs.empty()) return;
    const Point2 anchor = vertical ? Point2{sa.upper.x, (sa.lower.y + sa.upper.y) / 2}
                                   : Point2{(sa.lower.x + sa.upper.x) / 2, sa.upper.y};
    CoarseDofSpec spec{ConstraintKind::edge_average, anchor, {}};
    const double coefficient = 1.0 / static_cast<double>(dofs.size());
    for (const auto* sub : {&sa, &sb}) {
      ConstraintRow row{sub == &sa ? a : b, {}, {}, 1.0};
      for (const int dof : dofs) {
        row.columns.push_back(local_index(sub->interface_dofs, dof));
        row.coefficients.push_back(coefficient);
      }
      spec.rows.push_back(std::move(row));
    }
    edges.push_back(std::move(spec));
  };

  for (int sy = 0; sy < side; ++sy) {
    for (int sx = 0; sx + 1 < side; ++sx) add_edge(sy * side + sx, sy * side + sx + 1, true);
  }
  for (int sy = 0; sy + 1 < side; ++sy) {
    for (int sx = 0; sx < side; ++sx) add_edge(sy * side + sx, (sy + 1) * side + sx, false);
  }
  return edges;
}

Index ConstraintSet::row_count() const {
  Index rows = 0;
  for (const auto& c : local) rows += c.rows();
  return rows;
}

SparseMatrix ConstraintSet::matrix(const LevelDecomposition& decomposition) const {
  std::vector<Triplet> entries;
  Index row = 0;
  for (std::size_t s = 0; s < local.size(); ++s) {
    const Index offset = decomposition.subdomains[s].w_offset;
    for (Index r = 0; r < local[s].rows(); ++r, ++row) {
      for (Index c = 0; c < local[s].cols(); ++c) {
        if (local[s](r, c) != 0.0) entries.emplace_back(row, offset + c, local[s](r, c));
      }
    }
  }
  return sparse_from_triplets(row, decomposition.w_size, entries);
}

SparseMatrix ConstraintSet::coarse_map() const {
  std::vector<Triplet> entries;
  Index row = 0;
  for (std::size_t s = 0; s < coarse_ids.size(); ++s) {
    for (std::size_t r = 0; r < coarse_ids[s].size(); ++r, ++row) {
      entries.emplace_back(row, coarse_ids[s][r], coarse_values[s][r]);
    }
  }
  return sparse_from_triplets(row, coarse_size(), entries);
}

ConstraintSet make_constraint_set(const LevelDecomposition& decomposition,
                                  const std::vector<CoarseDofSpec>& specs) {
  const std::size_t ns = decomposition.subdomains.size();
  ConstraintSet set;
  set.local.resize(ns);
  set.coarse_ids.resize(ns);
  set.coarse_values.resize(ns);
  std::vector<std::vector<const ConstraintRow*>> rows(ns);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    set.coarse_positions.push_back(specs[c].anchor);
    set.coarse_kinds.push_back(specs[c].kind);
    for (const auto& row : specs[c].rows) {
      const auto s = static_cast<std::size_t>(row.subdomain);
      rows[s].push_back(&row);
      set.coarse_ids[s].push_back(static_cast<int>(c));
      set.coarse_values[s].push_back(row.coarse_value);
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const Index nw = decomposition.subdomains[s].w_size();
    set.local[s] = DenseMatrix::Zero(static_cast<Index>(rows[s].size()), nw);
    for (std::size_t r = 0; r < rows[s].size(); ++r) {
      const auto& row = *rows[s][r];
      for (std::size_t k = 0; k < row.columns.size(); ++k) {
        set.local[s](static_cast<Index>(r), row.columns[k]) += row.coefficients[k];
      }
    }
  }
  return set;
}

ConstraintSet build_constraints(const LevelProblem& problem, const LevelDecomposition& decomposition,
                                ConstraintRecipe recipe) {
  auto specs = select_corners(problem, decomposition);
  if (recipe == ConstraintRecipe::corners_edges) {
    auto edges = build_edge_averages(problem, decomposition);
    specs.insert(specs.end(), std::make_move_iterator(edges.begin()),
                 std::make_move_iterator(edges.end()));
  }
  return make_constraint_set(decomposition, specs);
}

CoarseSpace compute_coarse_basis(const SchurComplementSet& schur, const ConstraintSet& constraints,
                                 Execution exec) {
  const std::size_t ns = schur.subdomains.size();
  CoarseSpace space;
  space.subdomains.resize(ns);
  for_each_index(exec, ns, [&](std::size_t s) {
    const DenseMatrix& S = schur.subdomains[s].schur;
    const DenseMatrix& C = constraints.local[s];
    const Index nw = S.rows();
    const Index nc = C.rows();
    DenseMatrix saddle = DenseMatrix::Zero(nw + nc, nw + nc);
    saddle.topLeftCorner(nw, nw) = S;
    saddle.bottomLeftCorner(nc, nw) = C;
    saddle.topRightCorner(nw, nc) = C.transpose();
    auto& out = space.subdomains[s];
    try {
      out.saddle = symindef_factor(saddle);
    } catch (const Error& err) {
      throw Error(err.kind(), "constrained problem of subdomain " + std::to_string(s) + ": " + err.detail());
    }
    DenseMatrix rhs = DenseMatrix::Zero(nw + nc, nc);
    for (Index r = 0; r < nc; ++r) rhs(nw + r, r) = constraints.coarse_values[s][static_cast<std::size_t>(r)];
    out.basis = out.saddle.solve(rhs).topRows(nw);
    out.coarse_matrix = out.basis.transpose() * S * out.basis;
    out.coarse_matrix = 0.5 * (out.coarse_matrix + out.coarse_matrix.transpose()).eval();
  });

  std::vector<Triplet> entries;
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& ids = constraints.coarse_ids[s];
    const auto& sc = space.subdomains[s].coarse_matrix;
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = 0; b < ids.size(); ++b) {
        entries.emplace_back(ids[a], ids[b], sc(static_cast<Index>(a), static_cast<Index>(b)));
      }
    }
  }
  const Index nc = constraints.coarse_size();
  space.coarse_matrix = sparse_from_triplets(nc, nc, entries);
  return space;
}

LevelProblem coarse_level_problem(const LevelProblem& problem, const LevelDecomposition& decomposition,
                                  const ConstraintSet& constraints, const CoarseSpace& coarse,
                                  int ratio) {
  LevelProblem next;
  next.level = problem.level + 1;
  next.elements_per_side = decomposition.subdomains_per_side;
  next.element_size = problem.element_size * ratio;
  next.positions = constraints.coarse_positions;
  for (const auto kind : constraints.coarse_kinds) {
    next.kinds.push_back(kind == ConstraintKind::corner ? DofKind::corner : DofKind::edge_average);
  }
  next.elements.reserve(decomposition.subdomains.size());
  for (std::size_t s = 0; s < decomposition.subdomains.size(); ++s) {
    const auto& sub = decomposition.subdomains[s];
    next.elements.push_back({sub.sx, sub.sy, constraints.coarse_ids[s], coarse.subdomains[s].coarse_matrix, {}});
  }
  return next;
}

}  // namespace mlfeti::dd
