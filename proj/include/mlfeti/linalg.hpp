// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_LINALG_HPP
#define MLFETI_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <vector>

#include "mlfeti/parallel.hpp"

namespace mlfeti {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Largest column count materialize() will accept.
inline constexpr Index kMaterializeGuard = 20000;

/// Relative pivot threshold separating rank deficiency from roundoff.
inline constexpr double kPivotTolerance = 1e-12;

/// Cholesky factor of a dense symmetric positive definite matrix.
class SpdFactorization {
 public:
  SpdFactorization() = default;

  [[nodiscard]] Index size() const { return size_; }
  [[nodiscard]] Vector solve(const Vector& b) const;
  [[nodiscard]] DenseMatrix solve(const DenseMatrix& b) const;
  [[nodiscard]] const DenseMatrix& lower() const { return llt_.matrixLLT(); }

 private:
  friend SpdFactorization cholesky_factor(const DenseMatrix& a);
  Eigen::LLT<DenseMatrix> llt_;
  Index size_ = 0;
};

/// Throws Error{not_spd} when a pivot falls below kPivotTolerance times the
/// largest diagonal entry, and Error{invalid_argument} for a nonsymmetric or
/// nonsquare input.
SpdFactorization cholesky_factor(const DenseMatrix& a);

/// Factorization of a symmetric indefinite matrix, typically the saddle block
/// [[S, C^T], [C, 0]] of a constrained subdomain problem.
class SymIndefFactorization {
 public:
  SymIndefFactorization() = default;

  [[nodiscard]] Index size() const { return size_; }
  [[nodiscard]] Vector solve(const Vector& b) const;
  [[nodiscard]] DenseMatrix solve(const DenseMatrix& b) const;

 private:
  friend SymIndefFactorization symindef_factor(const DenseMatrix& k);
  Eigen::FullPivLU<DenseMatrix> lu_;
  Index size_ = 0;
};

/// Throws Error{singular} when the smallest pivot is below kPivotTolerance
/// times the largest entry magnitude.
SymIndefFactorization symindef_factor(const DenseMatrix& k);

/// Sparse Cholesky for large assembled SPD matrices (coarse problems).
class SparseSpdFactorization {
 public:
  explicit SparseSpdFactorization(const SparseMatrix& a);
  [[nodiscard]] Vector solve(const Vector& b) const;
  [[nodiscard]] Index size() const { return size_; }

 private:
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
  Index size_ = 0;
};

/// A linear map y = Op(x) given by a callable. Copies share the callable.
class LinearOperator {
 public:
  using Apply = std::function<Vector(const Vector&)>;

  LinearOperator() = default;
  LinearOperator(Index rows, Index cols, Apply apply)
      : rows_(rows), cols_(cols), apply_(std::move(apply)) {}

  [[nodiscard]] Index rows() const { return rows_; }
  [[nodiscard]] Index cols() const { return cols_; }
  [[nodiscard]] Vector apply(const Vector& x) const;
  Vector operator()(const Vector& x) const { return apply(x); }

  static LinearOperator identity(Index n);
  static LinearOperator from_dense(DenseMatrix a);
  static LinearOperator from_sparse(SparseMatrix a);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Apply apply_;
};

/// op_a * op_b, applying op_b first.
LinearOperator compose(const LinearOperator& op_a, const LinearOperator& op_b);

/// Column j of the result is op applied to the j-th unit vector. With
/// Execution::parallel the apply callable must be safe to call concurrently.
DenseMatrix materialize(const LinearOperator& op, Execution exec = Execution::serial,
                        Index guard = kMaterializeGuard);

/// Builds a sparse matrix from triplets; duplicates are summed.
SparseMatrix sparse_from_triplets(Index rows, Index cols, const std::vector<Triplet>& triplets);

[[nodiscard]] double max_abs(const DenseMatrix& a);
[[nodiscard]] bool is_symmetric(const DenseMatrix& a, double rel_tol = 1e-12);

}  // namespace mlfeti

#endif  // MLFETI_LINALG_HPP
