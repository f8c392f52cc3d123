// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/multilevel.hpp"

#include "mlfeti/error.hpp"

namespace mlfeti::dd {

SubstructuredLevel substructure(LevelProblem problem, const DecompositionHierarchy& hierarchy,
                                ConstraintRecipe recipe, Execution exec) {
  SubstructuredLevel level;
  level.decomposition = classify_interface(problem, hierarchy);
  level.maps = build_interface_maps(level.decomposition);
  level.schur = compute_schur_complements(problem, level.decomposition, exec);
  level.constraints = build_constraints(problem, level.decomposition, recipe);
  try {
    level.coarse = compute_coarse_basis(level.schur, level.constraints, exec);
  } catch (const Error& err) {
    throw Error(err.kind(), "level " + std::to_string(problem.level) + ": " + err.detail());
  }
  level.problem = std::move(problem);
  return level;
}

MultilevelHierarchy build_multilevel(const fem::AssembledProblem& problem,
                                     const DecompositionHierarchy& geometry, ConstraintRecipe recipe,
                                     Execution exec) {
  if (problem.grid.n != geometry.n) {
    throw Error(ErrorKind::incompatible_grid, "problem grid does not match the hierarchy");
  }
  MultilevelHierarchy h;
  h.geometry = geometry;
  h.recipe = recipe;
  LevelProblem current = fine_level_problem(problem);
  for (int l = 1; l < geometry.levels(); ++l) {
    h.levels.push_back(substructure(std::move(current), geometry, recipe, exec));
    const auto& built = h.levels.back();
    current = coarse_level_problem(built.problem, built.decomposition, built.constraints, built.coarse,
                                   geometry.ratios[static_cast<std::size_t>(l - 1)]);
  }
  h.top = std::move(current);
  try {
    h.top_factor = cholesky_factor(DenseMatrix(h.top.assemble()));
  } catch (const Error& err) {
    throw Error(err.kind(), "top-level coarse matrix: " + err.detail());
  }
  return h;
}

Vector apply_schur(const SubstructuredLevel& level, const Vector& w, Execution exec) {
  Vector out(w.size());
  const auto& subs = level.decomposition.subdomains;
  for_each_index(exec, subs.size(), [&](std::size_t s) {
    const auto& sub = subs[s];
    out.segment(sub.w_offset, sub.w_size()) =
        level.schur.subdomains[s].schur * w.segment(sub.w_offset, sub.w_size());
  });
  return out;
}

Vector apply_assembled_schur(const SubstructuredLevel& level, const Vector& x, Execution exec) {
  const Vector w = level.maps.restriction * x;
  return level.maps.restriction.transpose() * apply_schur(level, w, exec);
}

Vector apply_sdelta_inv(const SubstructuredLevel& level, const Vector& g, Execution exec) {
  Vector out(g.size());
  const auto& subs = level.decomposition.subdomains;
  for_each_index(exec, subs.size(), [&](std::size_t s) {
    const auto& sub = subs[s];
    const Index nw = sub.w_size();
    if (nw == 0) return;
    const auto& saddle = level.coarse.subdomains[s].saddle;
    Vector rhs = Vector::Zero(saddle.size());
    rhs.head(nw) = g.segment(sub.w_offset, nw);
    out.segment(sub.w_offset, nw) = saddle.solve(rhs).head(nw);
  });
  return out;
}

Vector apply_basis(const SubstructuredLevel& level, const Vector& uc, Execution exec) {
  Vector out(level.w_size());
  const auto& subs = level.decomposition.subdomains;
  for_each_index(exec, subs.size(), [&](std::size_t s) {
    const auto& sub = subs[s];
    const auto& ids = level.constraints.coarse_ids[s];
    Vector local(static_cast<Index>(ids.size()));
    for (std::size_t k = 0; k < ids.size(); ++k) local(static_cast<Index>(k)) = uc(ids[k]);
    out.segment(sub.w_offset, sub.w_size()) = level.coarse.subdomains[s].basis * local;
  });
  return out;
}

Vector apply_basis_transpose(const SubstructuredLevel& level, const Vector& w, Execution exec) {
  const auto& subs = level.decomposition.subdomains;
  std::vector<Vector> local(subs.size());
  for_each_index(exec, subs.size(), [&](std::size_t s) {
    const auto& sub = subs[s];
    local[s] = level.coarse.subdomains[s].basis.transpose() * w.segment(sub.w_offset, sub.w_size());
  });
  Vector out = Vector::Zero(level.coarse_size());
  for (std::size_t s = 0; s < subs.size(); ++s) {
    const auto& ids = level.constraints.coarse_ids[s];
    for (std::size_t k = 0; k < ids.size(); ++k) out(ids[k]) += local[s](static_cast<Index>(k));
  }
  return out;
}

Vector condensed_rhs(const SubstructuredLevel& level) {
  const auto& d = level.decomposition;
  Vector f = Vector::Zero(d.gamma_size());
  for (std::size_t s = 0; s < d.subdomains.size(); ++s) {
    const auto& sub = d.subdomains[s];
    const auto& local = level.schur.subdomains[s];
    Vector g = local.load(sub.interface);
    if (!sub.interior.empty()) {
      g -= local.interface_interior * local.interior.solve(Vector(local.load(sub.interior)));
    }
    for (std::size_t k = 0; k < sub.interface_dofs.size(); ++k) {
      f(d.gamma_index[static_cast<std::size_t>(sub.interface_dofs[k])]) += g(static_cast<Index>(k));
    }
  }
  return f;
}

Vector recover_interiors(const SubstructuredLevel& level, const Vector& w_gamma) {
  const auto& d = level.decomposition;
  Vector u = Vector::Zero(level.problem.dof_count());
  for (std::size_t g = 0; g < d.interface_dofs.size(); ++g) {
    u(d.interface_dofs[g]) = w_gamma(static_cast<Index>(g));
  }
  for (std::size_t s = 0; s < d.subdomains.size(); ++s) {
    const auto& sub = d.subdomains[s];
    if (sub.interior.empty()) continue;
    const auto& local = level.schur.subdomains[s];
    Vector wl(sub.w_size());
    for (std::size_t k = 0; k < sub.interface_dofs.size(); ++k) wl(static_cast<Index>(k)) = u(sub.interface_dofs[k]);
    const Vector ui = local.interior.solve(Vector(local.load(sub.interior) - local.interface_interior.transpose() * wl));
    for (std::size_t k = 0; k < sub.interior.size(); ++k) {
      u(sub.dofs[static_cast<std::size_t>(sub.interior[k])]) = ui(static_cast<Index>(k));
    }
  }
  return u;
}

Vector interface_bddc(const SubstructuredLevel& level, const Vector& r_gamma, const CoarseApply& coarse,
                      Execution exec) {
  const Vector h = level.maps.weights.cwiseProduct(level.maps.restriction * r_gamma);
  const Vector uc = coarse(apply_basis_transpose(level, h, exec));
  const Vector w = apply_basis(level, uc, exec) + apply_sdelta_inv(level, h, exec);
  return level.maps.averaging * w;
}

Vector apply_level(const MultilevelHierarchy& h, std::size_t index, const Vector& r, Execution exec) {
  if (index == 0 || index >= h.levels.size()) {
    throw Error(ErrorKind::invalid_argument, "apply_level needs a coarse level index");
  }
  const auto& level = h.levels[index];
  const auto& d = level.decomposition;
  const auto& subs = d.subdomains;
  const std::size_t ns = subs.size();

  // Static condensation of the residual.
  std::vector<Vector> interior(ns);
  std::vector<Vector> coupling(ns);
  for_each_index(exec, ns, [&](std::size_t s) {
    const auto& sub = subs[s];
    if (sub.interior.empty()) return;
    Vector ri(static_cast<Index>(sub.interior.size()));
    for (std::size_t k = 0; k < sub.interior.size(); ++k) {
      ri(static_cast<Index>(k)) = r(sub.dofs[static_cast<std::size_t>(sub.interior[k])]);
    }
    const auto& local = level.schur.subdomains[s];
    interior[s] = local.interior.solve(ri);
    coupling[s] = local.interface_interior * interior[s];
  });
  Vector u = Vector::Zero(r.size());
  Vector r_gamma(d.gamma_size());
  for (std::size_t g = 0; g < d.interface_dofs.size(); ++g) r_gamma(static_cast<Index>(g)) = r(d.interface_dofs[g]);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& sub = subs[s];
    if (sub.interior.empty()) continue;
    for (std::size_t k = 0; k < sub.interior.size(); ++k) {
      u(sub.dofs[static_cast<std::size_t>(sub.interior[k])]) = interior[s](static_cast<Index>(k));
    }
    for (std::size_t k = 0; k < sub.interface_dofs.size(); ++k) {
      r_gamma(d.gamma_index[static_cast<std::size_t>(sub.interface_dofs[k])]) -= coupling[s](static_cast<Index>(k));
    }
  }

  const CoarseApply coarse = [&](const Vector& rc) -> Vector {
    if (index + 1 < h.levels.size()) return apply_level(h, index + 1, rc, exec);
    return h.top_factor.solve(rc);
  };
  const Vector u_gamma = interface_bddc(level, r_gamma, coarse, exec);

  // Recovery of the interiors.
  std::vector<Vector> post(ns);
  for_each_index(exec, ns, [&](std::size_t s) {
    const auto& sub = subs[s];
    if (sub.interior.empty() || sub.interface_dofs.empty()) return;
    Vector wl(sub.w_size());
    for (std::size_t k = 0; k < sub.interface_dofs.size(); ++k) {
      wl(static_cast<Index>(k)) = u_gamma(d.gamma_index[static_cast<std::size_t>(sub.interface_dofs[k])]);
    }
    const auto& local = level.schur.subdomains[s];
    post[s] = local.interior.solve(Vector(local.interface_interior.transpose() * wl));
  });
  for (std::size_t s = 0; s < ns; ++s) {
    if (post[s].size() == 0) continue;
    const auto& sub = subs[s];
    for (std::size_t k = 0; k < sub.interior.size(); ++k) {
      u(sub.dofs[static_cast<std::size_t>(sub.interior[k])]) -= post[s](static_cast<Index>(k));
    }
  }
  for (std::size_t g = 0; g < d.interface_dofs.size(); ++g) u(d.interface_dofs[g]) = u_gamma(static_cast<Index>(g));
  return u;
}

Vector apply_multilevel_coarse(const MultilevelHierarchy& h, const Vector& rc, Execution exec) {
  if (h.levels.size() == 1) return h.top_factor.solve(rc);
  return apply_level(h, 1, rc, exec);
}

}  // namespace mlfeti::dd
