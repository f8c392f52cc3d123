// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/preconditioners.hpp"

#include "mlfeti/error.hpp"

namespace mlfeti {

namespace {

void check_size(Index expected, Index got, const char* what) {
  if (expected != got) {
    throw Error(ErrorKind::invalid_argument, std::string(what) + ": expected a vector of size " +
                                                 std::to_string(expected) + ", got " + std::to_string(got));
  }
}

}  // namespace

Vector CoarseSolver::apply(const Vector& rc) const {
  check_size(size(), rc.size(), "coarse solve");
  ++calls_;
  return solve(rc);
}

LinearOperator CoarseSolver::as_operator() const {
  return {size(), size(), [this](const Vector& x) { return apply(x); }};
}

ExactCoarseSolver::ExactCoarseSolver(const SparseMatrix& coarse_matrix, Index dense_limit)
    : size_(coarse_matrix.rows()) {
  if (coarse_matrix.rows() != coarse_matrix.cols()) {
    throw Error(ErrorKind::invalid_argument, "coarse matrix must be square");
  }
  if (size_ <= dense_limit) {
    dense_ = cholesky_factor(DenseMatrix(coarse_matrix));
  } else {
    sparse_.emplace(coarse_matrix);
  }
}

Vector ExactCoarseSolver::solve(const Vector& rc) const {
  return dense_ ? dense_->solve(rc) : sparse_->solve(rc);
}

MultilevelCoarseSolver::MultilevelCoarseSolver(std::shared_ptr<const dd::MultilevelHierarchy> hierarchy,
                                               Execution exec)
    : hierarchy_(std::move(hierarchy)), exec_(exec) {
  if (!hierarchy_ || hierarchy_->levels.empty()) {
    throw Error(ErrorKind::invalid_argument, "multilevel coarse solver needs a built hierarchy");
  }
}

Index MultilevelCoarseSolver::size() const { return hierarchy_->fine().coarse_size(); }

Vector MultilevelCoarseSolver::solve(const Vector& rc) const {
  return dd::apply_multilevel_coarse(*hierarchy_, rc, exec_);
}

StandinCoarseSolver::StandinCoarseSolver(const SparseMatrix& coarse_matrix, double omega) {
  const Vector diag = coarse_matrix.diagonal();
  if ((diag.array() <= 0.0).any()) {
    throw Error(ErrorKind::not_spd, "coarse matrix has a nonpositive diagonal entry");
  }
  inverse_diagonal_ = omega * diag.cwiseInverse();
}

Vector StandinCoarseSolver::solve(const Vector& rc) const { return inverse_diagonal_.cwiseProduct(rc); }

OperatorCoarseSolver::OperatorCoarseSolver(LinearOperator op, bool symmetric, std::string name)
    : op_(std::move(op)), symmetric_(symmetric), name_(std::move(name)) {
  if (op_.rows() != op_.cols()) throw Error(ErrorKind::invalid_argument, "coarse operator must be square");
}

Vector OperatorCoarseSolver::solve(const Vector& rc) const { return op_.apply(rc); }

std::shared_ptr<CoarseSolver> default_coarse_solver(std::shared_ptr<const dd::MultilevelHierarchy> h,
                                                    Execution exec) {
  return std::make_shared<MultilevelCoarseSolver>(std::move(h), exec);
}

LinearOperator assembled_schur_operator(const dd::SubstructuredLevel& level, Execution exec) {
  const Index n = level.gamma_size();
  return {n, n, [&level, exec](const Vector& x) { return dd::apply_assembled_schur(level, x, exec); }};
}

BddcPreconditioner::BddcPreconditioner(const dd::SubstructuredLevel& level,
                                       std::shared_ptr<const CoarseSolver> coarse, Execution exec)
    : level_(&level), coarse_(std::move(coarse)), exec_(exec) {
  if (!coarse_ || coarse_->size() != level.coarse_size()) {
    throw Error(ErrorKind::invalid_argument, "coarse solver does not match the coarse space");
  }
}

Vector BddcPreconditioner::apply(const Vector& r_gamma) const {
  check_size(level_->gamma_size(), r_gamma.size(), "BDDC");
  return dd::interface_bddc(
      *level_, r_gamma, [this](const Vector& rc) { return coarse_->apply(rc); }, exec_);
}

Vector BddcPreconditioner::apply_h(const Vector& w) const {
  check_size(level_->w_size(), w.size(), "H");
  const Vector uc = coarse_->apply(dd::apply_basis_transpose(*level_, w, exec_));
  return dd::apply_basis(*level_, uc, exec_) + dd::apply_sdelta_inv(*level_, w, exec_);
}

LinearOperator BddcPreconditioner::as_operator() const {
  const Index n = level_->gamma_size();
  return {n, n, [this](const Vector& r) { return apply(r); }};
}

LinearOperator BddcPreconditioner::h_operator() const {
  const Index n = level_->w_size();
  return {n, n, [this](const Vector& w) { return apply_h(w); }};
}

DirichletPreconditioner::DirichletPreconditioner(const dd::SubstructuredLevel& level, Execution exec)
    : level_(&level), exec_(exec), calls_(std::make_shared<std::atomic<std::size_t>>(0)) {}

Index DirichletPreconditioner::size() const { return level_->lambda_size(); }

Vector DirichletPreconditioner::apply(const Vector& y) const {
  check_size(size(), y.size(), "Dirichlet preconditioner");
  ++*calls_;
  const auto& bd = level_->maps.scaled_jump;
  const Vector w = bd.transpose() * y;
  return bd * dd::apply_schur(*level_, w, exec_);
}

LinearOperator DirichletPreconditioner::as_operator() const {
  const Index n = size();
  return {n, n, [self = *this](const Vector& y) { return self.apply(y); }};
}

}  // namespace mlfeti
