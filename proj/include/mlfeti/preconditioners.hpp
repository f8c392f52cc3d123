// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_PRECONDITIONERS_HPP
#define MLFETI_PRECONDITIONERS_HPP

#include <atomic>
#include <memory>
#include <optional>
#include <string>

#include "mlfeti/linalg.hpp"
#include "mlfeti/multilevel.hpp"
#include "mlfeti/parallel.hpp"

namespace mlfeti {

/// Approximate or exact inverse of a coarse matrix S_c.
class CoarseSolver {
 public:
  virtual ~CoarseSolver() = default;

  [[nodiscard]] Vector apply(const Vector& rc) const;
  [[nodiscard]] virtual Index size() const = 0;
  [[nodiscard]] virtual bool symmetric() const { return true; }
  [[nodiscard]] virtual std::string name() const = 0;

  [[nodiscard]] std::size_t calls() const { return calls_.load(); }
  void reset_calls() const { calls_.store(0); }

  [[nodiscard]] LinearOperator as_operator() const;

 protected:
  [[nodiscard]] virtual Vector solve(const Vector& rc) const = 0;

 private:
  mutable std::atomic<std::size_t> calls_{0};
};

/// S_c^{-1} through a Cholesky factorization (dense up to `dense_limit`,
/// sparse LDL^T beyond).
class ExactCoarseSolver final : public CoarseSolver {
 public:
  explicit ExactCoarseSolver(const SparseMatrix& coarse_matrix, Index dense_limit = 3000);
  [[nodiscard]] Index size() const override { return size_; }
  [[nodiscard]] std::string name() const override { return "exact"; }

 protected:
  [[nodiscard]] Vector solve(const Vector& rc) const override;

 private:
  Index size_ = 0;
  std::optional<SpdFactorization> dense_;
  std::optional<SparseSpdFactorization> sparse_;
};

/// One multilevel BDDC sweep over levels 2..L of a hierarchy.
class MultilevelCoarseSolver final : public CoarseSolver {
 public:
  MultilevelCoarseSolver(std::shared_ptr<const dd::MultilevelHierarchy> hierarchy,
                         Execution exec = Execution::serial);
  [[nodiscard]] Index size() const override;
  [[nodiscard]] std::string name() const override { return "multilevel"; }

 protected:
  [[nodiscard]] Vector solve(const Vector& rc) const override;

 private:
  std::shared_ptr<const dd::MultilevelHierarchy> hierarchy_;
  Execution exec_;
};

/// omega * diag(S_c)^{-1}.
class StandinCoarseSolver final : public CoarseSolver {
 public:
  explicit StandinCoarseSolver(const SparseMatrix& coarse_matrix, double omega = 1.0);
  [[nodiscard]] Index size() const override { return inverse_diagonal_.size(); }
  [[nodiscard]] std::string name() const override { return "standin"; }

 protected:
  [[nodiscard]] Vector solve(const Vector& rc) const override;

 private:
  Vector inverse_diagonal_;
};

/// Wraps an arbitrary operator, possibly nonsymmetric.
class OperatorCoarseSolver final : public CoarseSolver {
 public:
  OperatorCoarseSolver(LinearOperator op, bool symmetric, std::string name = "operator");
  [[nodiscard]] Index size() const override { return op_.rows(); }
  [[nodiscard]] bool symmetric() const override { return symmetric_; }
  [[nodiscard]] std::string name() const override { return name_; }

 protected:
  [[nodiscard]] Vector solve(const Vector& rc) const override;

 private:
  LinearOperator op_;
  bool symmetric_;
  std::string name_;
};

/// The coarse solver a method uses on `h`: exact for two levels, multilevel
/// otherwise.
std::shared_ptr<CoarseSolver> default_coarse_solver(std::shared_ptr<const dd::MultilevelHierarchy> h,
                                                    Execution exec = Execution::serial);

/// The assembled Schur complement R^T S R as an operator on Gamma.
LinearOperator assembled_schur_operator(const dd::SubstructuredLevel& level,
                                        Execution exec = Execution::serial);

/// H = Psi M_c Psi^T + S_Delta^{-1} and the BDDC preconditioner E H E^T.
class BddcPreconditioner {
 public:
  BddcPreconditioner(const dd::SubstructuredLevel& level, std::shared_ptr<const CoarseSolver> coarse,
                     Execution exec = Execution::serial);

  [[nodiscard]] Vector apply(const Vector& r_gamma) const;
  /// H w on the W space.
  [[nodiscard]] Vector apply_h(const Vector& w) const;
  [[nodiscard]] LinearOperator as_operator() const;
  [[nodiscard]] LinearOperator h_operator() const;

  [[nodiscard]] const dd::SubstructuredLevel& level() const { return *level_; }
  [[nodiscard]] const CoarseSolver& coarse() const { return *coarse_; }

 private:
  const dd::SubstructuredLevel* level_;
  std::shared_ptr<const CoarseSolver> coarse_;
  Execution exec_;
};

/// M_D = B_D S B_D^T on the multiplier space.
class DirichletPreconditioner {
 public:
  explicit DirichletPreconditioner(const dd::SubstructuredLevel& level, Execution exec = Execution::serial);

  [[nodiscard]] Vector apply(const Vector& y) const;
  [[nodiscard]] LinearOperator as_operator() const;
  [[nodiscard]] Index size() const;

  [[nodiscard]] std::size_t calls() const { return calls_->load(); }
  void reset_calls() const { calls_->store(0); }

 private:
  const dd::SubstructuredLevel* level_;
  Execution exec_;
  std::shared_ptr<std::atomic<std::size_t>> calls_;
};

}  // namespace mlfeti

#endif  // MLFETI_PRECONDITIONERS_HPP
