// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/fetidp.hpp"

#include "mlfeti/error.hpp"

namespace mlfeti {

FetiDpOperator::FetiDpOperator(const dd::SubstructuredLevel& level,
                               std::shared_ptr<const CoarseSolver> coarse, Execution exec)
    : bddc_(level, std::move(coarse), exec) {}

Vector FetiDpOperator::apply(const Vector& lambda) const {
  const auto& b = bddc_.level().maps.jump;
  if (lambda.size() != b.rows()) throw Error(ErrorKind::invalid_argument, "F: multiplier size mismatch");
  return b * bddc_.apply_h(b.transpose() * lambda);
}

LinearOperator FetiDpOperator::as_operator() const {
  return {size(), size(), [this](const Vector& x) { return apply(x); }};
}

FetiDpSaddleSystem::FetiDpSaddleSystem(const dd::SubstructuredLevel& level, Execution exec)
    : level_(&level), exec_(exec) {}

Vector FetiDpSaddleSystem::apply(const Vector& x) const {
  if (x.size() != size()) throw Error(ErrorKind::invalid_argument, "saddle system: vector size mismatch");
  const Index nc = coarse_size();
  const auto& b = level_->maps.jump;
  const Vector uc = x.head(nc);
  const Vector lambda = x.tail(lambda_size());
  const Vector bt_lambda = b.transpose() * lambda;

  Vector y(size());
  y.head(nc) = level_->coarse.coarse_matrix * uc + dd::apply_basis_transpose(*level_, bt_lambda, exec_);
  y.tail(lambda_size()) =
      b * (dd::apply_basis(*level_, uc, exec_) - dd::apply_sdelta_inv(*level_, bt_lambda, exec_));
  return y;
}

LinearOperator FetiDpSaddleSystem::as_operator() const {
  return {size(), size(), [this](const Vector& x) { return apply(x); }};
}

Vector FetiDpSaddleSystem::rhs(const Vector& f_gamma) const {
  if (f_gamma.size() != level_->gamma_size()) {
    throw Error(ErrorKind::invalid_argument, "saddle system: load size mismatch");
  }
  const Vector g = level_->maps.weights.cwiseProduct(level_->maps.restriction * f_gamma);
  Vector r(size());
  r.head(coarse_size()) = dd::apply_basis_transpose(*level_, g, exec_);
  r.tail(lambda_size()) = -(level_->maps.jump * dd::apply_sdelta_inv(*level_, g, exec_));
  return r;
}

MfPreconditioner::MfPreconditioner(const dd::SubstructuredLevel& level,
                                   std::shared_ptr<const CoarseSolver> coarse, MfMode mode, Execution exec)
    : level_(&level), coarse_(std::move(coarse)), dirichlet_(level, exec), mode_(mode), exec_(exec) {
  if (!coarse_ || coarse_->size() != level.coarse_size()) {
    throw Error(ErrorKind::invalid_argument, "coarse solver does not match the coarse space");
  }
}

Vector MfPreconditioner::apply(const Vector& r) const {
  const Index nc = level_->coarse_size();
  const Index nl = level_->lambda_size();
  if (r.size() != nc + nl) throw Error(ErrorKind::invalid_argument, "M_F: vector size mismatch");
  Vector out(nc + nl);
  const Vector uc = coarse_->apply(r.head(nc));
  out.head(nc) = uc;
  if (mode_ == MfMode::triangular) {
    const Vector y = level_->maps.jump * dd::apply_basis(*level_, uc, exec_) - r.tail(nl);
    out.tail(nl) = dirichlet_.apply(y);
  } else {
    out.tail(nl) = -dirichlet_.apply(r.tail(nl));
  }
  return out;
}

LinearOperator MfPreconditioner::as_operator() const {
  const Index n = level_->coarse_size() + level_->lambda_size();
  return {n, n, [this](const Vector& x) { return apply(x); }};
}

RecoveredSolution recover_solution(const dd::SubstructuredLevel& level, const Vector& saddle_solution,
                                   const Vector& f_gamma, Execution exec) {
  const Index nc = level.coarse_size();
  if (saddle_solution.size() != nc + level.lambda_size() || f_gamma.size() != level.gamma_size()) {
    throw Error(ErrorKind::invalid_argument, "recover_solution: size mismatch");
  }
  const auto& maps = level.maps;
  const Vector uc = saddle_solution.head(nc);
  const Vector lambda = saddle_solution.tail(level.lambda_size());

  RecoveredSolution out;
  const Vector primal = dd::apply_basis(level, uc, exec);
  const Vector g = maps.weights.cwiseProduct(maps.restriction * f_gamma) - maps.jump.transpose() * lambda -
                   dd::apply_schur(level, primal, exec);
  out.w = primal + dd::apply_sdelta_inv(level, g, exec);
  out.jump_norm = (maps.jump * out.w).norm();
  out.interface = maps.averaging * out.w;
  out.field = dd::recover_interiors(level, out.interface);
  return out;
}

}  // namespace mlfeti
