// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlfeti/error.hpp"

namespace mlfeti {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::not_spd: return "NotSPD";
    case ErrorKind::singular: return "Singular";
    case ErrorKind::too_large: return "TooLarge";
    case ErrorKind::incompatible_grid: return "IncompatibleGrid";
    case ErrorKind::construction_failed: return "ConstructionFailed";
    case ErrorKind::singular_interior: return "SingularInterior";
    case ErrorKind::breakdown: return "Breakdown";
    case ErrorKind::stagnation: return "Stagnation";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::config: return "ConfigError";
  }
  return "Error";
}

double max_abs(const DenseMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_symmetric(const DenseMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = max_abs(a);
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * std::max(scale, 1e-300);
}

SpdFactorization cholesky_factor(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::invalid_argument, "cholesky_factor needs a square matrix");
  }
  SpdFactorization f;
  f.size_ = a.rows();
  if (a.rows() == 0) return f;
  if (!is_symmetric(a)) {
    throw Error(ErrorKind::invalid_argument, "cholesky_factor needs a symmetric matrix");
  }
  const double max_diag = a.diagonal().cwiseAbs().maxCoeff();
  f.llt_.compute(a);
  if (f.llt_.info() != Eigen::Success) {
    throw Error(ErrorKind::not_spd, "nonpositive pivot in Cholesky factorization");
  }
  const Vector pivots = f.llt_.matrixLLT().diagonal().array().square();
  if (pivots.minCoeff() <= kPivotTolerance * max_diag) {
    throw Error(ErrorKind::not_spd, "Cholesky pivot below tolerance (rank-deficient matrix)");
  }
  return f;
}

Vector SpdFactorization::solve(const Vector& b) const {
  if (size_ == 0) return Vector(0);
  return llt_.solve(b);
}

DenseMatrix SpdFactorization::solve(const DenseMatrix& b) const {
  if (size_ == 0) return DenseMatrix(0, b.cols());
  return llt_.solve(b);
}

SymIndefFactorization symindef_factor(const DenseMatrix& k) {
  if (k.rows() != k.cols()) {
    throw Error(ErrorKind::invalid_argument, "symindef_factor needs a square matrix");
  }
  SymIndefFactorization f;
  f.size_ = k.rows();
  if (k.rows() == 0) return f;
  if (!is_symmetric(k)) {
    throw Error(ErrorKind::invalid_argument, "symindef_factor needs a symmetric matrix");
  }
  f.lu_.compute(k);
  const double scale = max_abs(k);
  const double min_pivot = f.lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > kPivotTolerance * scale)) {
    throw Error(ErrorKind::singular, "pivot " + std::to_string(min_pivot) +
                                         " below tolerance in symmetric indefinite factorization");
  }
  return f;
}

Vector SymIndefFactorization::solve(const Vector& b) const {
  if (size_ == 0) return Vector(0);
  return lu_.solve(b);
}

DenseMatrix SymIndefFactorization::solve(const DenseMatrix& b) const {
  if (size_ == 0) return DenseMatrix(0, b.cols());
  return lu_.solve(b);
}

SparseSpdFactorization::SparseSpdFactorization(const SparseMatrix& a)
    : ldlt_(std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>()),
      size_(a.rows()) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::invalid_argument, "sparse Cholesky needs a square matrix");
  }
  if (size_ == 0) return;
  Eigen::SparseMatrix<double> col_major = a;
  ldlt_->compute(col_major);
  if (ldlt_->info() != Eigen::Success) {
    throw Error(ErrorKind::not_spd, "sparse LDL^T factorization failed");
  }
  const Vector d = ldlt_->vectorD();
  double max_diag = 0.0;
  for (Index i = 0; i < a.rows(); ++i) max_diag = std::max(max_diag, std::abs(a.coeff(i, i)));
  if (d.minCoeff() <= kPivotTolerance * max_diag) {
    throw Error(ErrorKind::not_spd, "sparse LDL^T pivot below tolerance");
  }
}

Vector SparseSpdFactorization::solve(const Vector& b) const {
  if (size_ == 0) return Vector(0);
  return ldlt_->solve(b);
}

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != cols_) {
    throw Error(ErrorKind::invalid_argument, "operator applied to a vector of size " +
                                                 std::to_string(x.size()) + ", expected " +
                                                 std::to_string(cols_));
  }
  return apply_(x);
}

LinearOperator LinearOperator::identity(Index n) {
  return {n, n, [](const Vector& x) { return x; }};
}

LinearOperator LinearOperator::from_dense(DenseMatrix a) {
  const Index r = a.rows();
  const Index c = a.cols();
  auto shared = std::make_shared<const DenseMatrix>(std::move(a));
  return {r, c, [shared](const Vector& x) -> Vector { return *shared * x; }};
}

LinearOperator LinearOperator::from_sparse(SparseMatrix a) {
  const Index r = a.rows();
  const Index c = a.cols();
  auto shared = std::make_shared<const SparseMatrix>(std::move(a));
  return {r, c, [shared](const Vector& x) -> Vector { return *shared * x; }};
}

LinearOperator compose(const LinearOperator& op_a, const LinearOperator& op_b) {
  if (op_a.cols() != op_b.rows()) {
    throw Error(ErrorKind::invalid_argument, "compose: inner dimensions differ");
  }
  return {op_a.rows(), op_b.cols(), [op_a, op_b](const Vector& x) { return op_a(op_b(x)); }};
}

DenseMatrix materialize(const LinearOperator& op, Execution exec, Index guard) {
  if (op.cols() > guard) {
    throw Error(ErrorKind::too_large, "materialize: " + std::to_string(op.cols()) +
                                          " columns exceed the guard of " + std::to_string(guard));
  }
  DenseMatrix out(op.rows(), op.cols());
  for_each_index(exec, static_cast<std::size_t>(op.cols()), [&](std::size_t j) {
    Vector e = Vector::Zero(op.cols());
    e(static_cast<Index>(j)) = 1.0;
    out.col(static_cast<Index>(j)) = op(e);
  });
  return out;
}

SparseMatrix sparse_from_triplets(Index rows, Index cols, const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace mlfeti
