// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mlfeti/error.hpp"

namespace mlfeti {

namespace {

void check_square(const LinearOperator& op, const LinearOperator& prec, const Vector& b) {
  if (op.rows() != op.cols() || prec.rows() != prec.cols() || op.rows() != prec.rows() ||
      op.rows() != b.size()) {
    throw Error(ErrorKind::invalid_argument, "Krylov solver: operator, preconditioner and rhs sizes differ");
  }
}

KrylovReport trivial_report(Index n) {
  KrylovReport report;
  report.converged = true;
  report.solution = Vector::Zero(n);
  report.residual_history.push_back(0.0);
  return report;
}

}  // namespace

double symmetry_defect(const LinearOperator& op, int probes) {
  if (op.rows() != op.cols()) return std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(20260501);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const Index n = op.rows();
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    Vector x(n);
    Vector y(n);
    for (Index i = 0; i < n; ++i) x(i) = dist(rng);
    for (Index i = 0; i < n; ++i) y(i) = dist(rng);
    const Vector ax = op.apply(x);
    const Vector ay = op.apply(y);
    const double scale = std::max(x.norm() * ay.norm(), y.norm() * ax.norm());
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(x.dot(ay) - y.dot(ax)) / scale);
  }
  return worst;
}

KrylovReport pcg(const LinearOperator& op, const LinearOperator& prec, const Vector& b,
                 const KrylovOptions& options) {
  check_square(op, prec, b);
  const Index n = b.size();
  if (options.check_symmetry) {
    if (symmetry_defect(op) > 1e-8) throw Error(ErrorKind::invalid_argument, "PCG: operator is not symmetric");
    if (symmetry_defect(prec) > 1e-8) {
      throw Error(ErrorKind::invalid_argument, "PCG: preconditioner is not symmetric");
    }
  }
  const double bnorm = b.norm();
  if (bnorm == 0.0) return trivial_report(n);
  const Index cap = options.max_iterations >= 0 ? options.max_iterations : 2 * n + 10;

  KrylovReport report;
  report.residual_history.push_back(1.0);
  Vector x = Vector::Zero(n);
  Vector r = b;
  Vector z = prec.apply(r);
  Vector p = z;
  double rz = r.dot(z);
  if (!(rz > 0.0)) throw Error(ErrorKind::breakdown, "PCG: preconditioner is not positive definite");

  for (Index it = 1; it <= cap; ++it) {
    const Vector ap = op.apply(p);
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) {
      throw Error(ErrorKind::breakdown, "PCG: nonpositive curvature at iteration " + std::to_string(it));
    }
    const double alpha = rz / curvature;
    x += alpha * p;
    r -= alpha * ap;
    const double rel = r.norm() / bnorm;
    report.residual_history.push_back(rel);
    report.iterations = it;
    if (rel <= options.tol) {
      report.converged = true;
      report.solution = std::move(x);
      return report;
    }
    z = prec.apply(r);
    const double rz_next = r.dot(z);
    if (!(rz_next > 0.0)) {
      throw Error(ErrorKind::breakdown, "PCG: preconditioner is not positive definite");
    }
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw Error(ErrorKind::no_convergence, "PCG: no convergence in " + std::to_string(cap) + " iterations");
}

KrylovReport gmres_right(const LinearOperator& op, const LinearOperator& prec, const Vector& b,
                         const KrylovOptions& options) {
  check_square(op, prec, b);
  const Index n = b.size();
  const double bnorm = b.norm();
  if (bnorm == 0.0) return trivial_report(n);
  const Index cap = options.max_iterations >= 0 ? options.max_iterations : n;

  KrylovReport report;
  report.residual_history.push_back(1.0);
  std::vector<Vector> basis{b / bnorm};
  std::vector<Vector> columns;  // rotated Hessenberg columns
  std::vector<double> cs;
  std::vector<double> sn;
  std::vector<double> g{bnorm};

  auto finish = [&](Index k) {
    Vector y = Vector::Zero(k);
    for (Index i = k - 1; i >= 0; --i) {
      double s = g[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < k; ++j) s -= columns[static_cast<std::size_t>(j)](i) * y(j);
      y(i) = s / columns[static_cast<std::size_t>(i)](i);
    }
    Vector v = Vector::Zero(n);
    for (Index j = 0; j < k; ++j) v += y(j) * basis[static_cast<std::size_t>(j)];
    report.solution = prec.apply(v);
  };

  const Index limit = std::min(cap, n);
  for (Index k = 0; k < limit; ++k) {
    Vector w = op.apply(prec.apply(basis.back()));
    const double wnorm = w.norm();
    Vector h = Vector::Zero(k + 2);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j <= k; ++j) {
        const double dot = basis[static_cast<std::size_t>(j)].dot(w);
        h(j) += dot;
        w -= dot * basis[static_cast<std::size_t>(j)];
      }
    }
    const double hnext = w.norm();
    h(k + 1) = hnext;

    for (Index j = 0; j < k; ++j) {
      const auto js = static_cast<std::size_t>(j);
      const double a = h(j);
      const double c = h(j + 1);
      h(j) = cs[js] * a + sn[js] * c;
      h(j + 1) = -sn[js] * a + cs[js] * c;
    }
    const double rho = std::hypot(h(k), h(k + 1));
    if (rho == 0.0) throw Error(ErrorKind::breakdown, "GMRES: singular Hessenberg matrix");
    cs.push_back(h(k) / rho);
    sn.push_back(h(k + 1) / rho);
    h(k) = rho;
    h(k + 1) = 0.0;
    columns.push_back(std::move(h));
    g.push_back(-sn.back() * g.back());
    g[static_cast<std::size_t>(k)] *= cs.back();

    const double rel = std::abs(g.back()) / bnorm;
    report.residual_history.push_back(rel);
    report.iterations = k + 1;
    const bool lucky = hnext <= 1e-14 * wnorm;
    if (rel <= options.tol || lucky) {
      finish(k + 1);
      report.converged = true;
      return report;
    }
    basis.push_back(w / hnext);
  }
  throw Error(ErrorKind::stagnation, "GMRES: no convergence in " + std::to_string(std::min(cap, n)) + " iterations");
}

}  // namespace mlfeti
