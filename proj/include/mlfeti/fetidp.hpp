// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_FETIDP_HPP
#define MLFETI_FETIDP_HPP

#include <memory>

#include "mlfeti/linalg.hpp"
#include "mlfeti/multilevel.hpp"
#include "mlfeti/preconditioners.hpp"

namespace mlfeti {

/// F = B (Psi M_c Psi^T + S_Delta^{-1}) B^T. With an exact coarse solver this
/// is the FETI-DP operator; with an approximate one it is F-tilde.
class FetiDpOperator {
 public:
  FetiDpOperator(const dd::SubstructuredLevel& level, std::shared_ptr<const CoarseSolver> coarse,
                 Execution exec = Execution::serial);

  [[nodiscard]] Vector apply(const Vector& lambda) const;
  [[nodiscard]] LinearOperator as_operator() const;
  [[nodiscard]] Index size() const { return bddc_.level().lambda_size(); }

 private:
  BddcPreconditioner bddc_;
};

/// [[S_c, Psi^T B^T], [B Psi, -B S_Delta^{-1} B^T]] acting on (u_c, lambda).
class FetiDpSaddleSystem {
 public:
  explicit FetiDpSaddleSystem(const dd::SubstructuredLevel& level, Execution exec = Execution::serial);

  [[nodiscard]] Index coarse_size() const { return level_->coarse_size(); }
  [[nodiscard]] Index lambda_size() const { return level_->lambda_size(); }
  [[nodiscard]] Index size() const { return coarse_size() + lambda_size(); }

  [[nodiscard]] Vector apply(const Vector& x) const;
  [[nodiscard]] LinearOperator as_operator() const;
  /// [Psi^T E^T f; -B S_Delta^{-1} E^T f] for an interface load f on Gamma.
  [[nodiscard]] Vector rhs(const Vector& f_gamma) const;

 private:
  const dd::SubstructuredLevel* level_;
  Execution exec_;
};

enum class MfMode { triangular, block_diagonal };

/// M_F (block lower triangular) or M_BD (block diagonal) for the saddle system.
class MfPreconditioner {
 public:
  MfPreconditioner(const dd::SubstructuredLevel& level, std::shared_ptr<const CoarseSolver> coarse,
                   MfMode mode = MfMode::triangular, Execution exec = Execution::serial);

  [[nodiscard]] Vector apply(const Vector& r) const;
  [[nodiscard]] LinearOperator as_operator() const;
  [[nodiscard]] MfMode mode() const { return mode_; }
  [[nodiscard]] const CoarseSolver& coarse() const { return *coarse_; }
  [[nodiscard]] const DirichletPreconditioner& dirichlet() const { return dirichlet_; }

 private:
  const dd::SubstructuredLevel* level_;
  std::shared_ptr<const CoarseSolver> coarse_;
  DirichletPreconditioner dirichlet_;
  MfMode mode_;
  Execution exec_;
};

struct RecoveredSolution {
  Vector w;             // on W, before averaging
  Vector interface;     // on Gamma
  Vector field;         // all level dofs
  double jump_norm = 0.0;  // ||B w||
};

/// w = Psi u_c + S_Delta^{-1} (E^T f - B^T lambda - S Psi u_c), then interior
/// back-substitution from the level load.
RecoveredSolution recover_solution(const dd::SubstructuredLevel& level, const Vector& saddle_solution,
                                   const Vector& f_gamma, Execution exec = Execution::serial);

}  // namespace mlfeti

#endif  // MLFETI_FETIDP_HPP
