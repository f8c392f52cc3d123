// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

#include "mlfeti/error.hpp"

namespace mlfeti {

std::string_view to_string(SpectrumMethod method) {
  return method == SpectrumMethod::dense ? "dense" : "arnoldi";
}

void sort_by_magnitude(std::vector<Complex>& values) {
  std::stable_sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

namespace {

std::vector<Complex> eigenvalues_of(const DenseMatrix& a) {
  Eigen::EigenSolver<DenseMatrix> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::no_convergence, "dense eigensolver did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

SpectrumReport dense_spectrum(const LinearOperator& op, Index k, Execution exec, Index guard) {
  if (op.rows() != op.cols()) throw Error(ErrorKind::invalid_argument, "spectrum of a nonsquare operator");
  SpectrumReport report;
  report.method = SpectrumMethod::dense;
  const Index n = op.rows();
  report.requested = k < 0 ? n : k;
  if (n == 0) return report;
  report.eigenvalues = eigenvalues_of(materialize(op, exec, guard));
  sort_by_magnitude(report.eigenvalues);
  report.eigenvalues.resize(static_cast<std::size_t>(std::min(report.requested, n)));
  return report;
}

SpectrumReport arnoldi_topk(const LinearOperator& op, Index k, const ArnoldiOptions& options) {
  if (op.rows() != op.cols()) throw Error(ErrorKind::invalid_argument, "spectrum of a nonsquare operator");
  const Index n = op.rows();
  if (k < 0 || k > n) throw Error(ErrorKind::invalid_argument, "arnoldi_topk: k must lie in [0, n]");
  SpectrumReport report;
  report.method = SpectrumMethod::arnoldi;
  report.requested = k;
  if (k == 0) return report;

  const Index max_dim = options.max_dimension < 0 ? n : std::min(options.max_dimension, n);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v0(n);
  for (Index i = 0; i < n; ++i) v0(i) = dist(rng);

  std::vector<Vector> basis{v0 / v0.norm()};
  DenseMatrix hess = DenseMatrix::Zero(std::min<Index>(max_dim, 64) + 1, std::min<Index>(max_dim, 64));

  for (Index m = 1; m <= max_dim; ++m) {
    if (m > hess.cols()) {
      const Index cols = std::min<Index>(2 * hess.cols(), max_dim);
      DenseMatrix grown = DenseMatrix::Zero(cols + 1, cols);
      grown.topLeftCorner(hess.rows(), hess.cols()) = hess;
      hess.swap(grown);
    }
    const Index j = m - 1;
    Vector w = op.apply(basis.back());
    const double wnorm = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i <= j; ++i) {
        const double dot = basis[static_cast<std::size_t>(i)].dot(w);
        hess(i, j) += dot;
        w -= dot * basis[static_cast<std::size_t>(i)];
      }
    }
    const double hnext = w.norm();
    hess(m, j) = hnext;
    const bool invariant = hnext <= 1e-13 * std::max(wnorm, 1e-300) || m == n;

    if (m >= k && (invariant || m == max_dim || m % options.check_every == 0)) {
      Eigen::EigenSolver<DenseMatrix> solver(hess.topLeftCorner(m, m), true);
      if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::no_convergence, "Hessenberg eigensolver did not converge");
      }
      const auto values = solver.eigenvalues();
      const auto vectors = solver.eigenvectors();
      std::vector<Index> order(static_cast<std::size_t>(m));
      for (Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a, Index b) { return std::abs(values(a)) > std::abs(values(b)); });
      bool converged = true;
      for (Index t = 0; t < k && !invariant; ++t) {
        const Index idx = order[static_cast<std::size_t>(t)];
        const double residual = hnext * std::abs(vectors(m - 1, idx)) / vectors.col(idx).norm();
        if (residual > options.tol * std::max(std::abs(values(idx)), 1e-300)) {
          converged = false;
          break;
        }
      }
      if (converged) {
        // Ritz values from an invariant subspace may cover fewer than k.
        for (Index t = 0; t < std::min(k, m); ++t) {
          report.eigenvalues.push_back(values(order[static_cast<std::size_t>(t)]));
        }
        sort_by_magnitude(report.eigenvalues);
        return report;
      }
    }
    if (invariant) break;
    basis.push_back(w / hnext);
  }
  throw Error(ErrorKind::no_convergence,
              "Arnoldi: top " + std::to_string(k) + " Ritz values did not converge within dimension " +
                  std::to_string(max_dim));
}

SpectrumMatch compare_spectra(const SpectrumReport& a, const SpectrumReport& b, double drop_tol, double tol,
                              Index compare_count) {
  auto keep = [drop_tol](const std::vector<Complex>& values) {
    std::vector<Complex> out;
    for (const auto& z : values) {
      if (std::abs(z) <= drop_tol || std::abs(z - 1.0) <= drop_tol) continue;
      out.push_back(z);
    }
    sort_by_magnitude(out);
    return out;
  };
  SpectrumMatch match;
  match.kept_a = keep(a.eigenvalues);
  match.kept_b = keep(b.eigenvalues);
  std::size_t na = match.kept_a.size();
  std::size_t nb = match.kept_b.size();
  if (compare_count >= 0) {
    na = std::min(na, static_cast<std::size_t>(compare_count));
    nb = std::min(nb, static_cast<std::size_t>(compare_count));
  }
  const std::size_t common = std::min(na, nb);
  for (std::size_t i = 0; i < common; ++i) {
    const double dev = std::abs(match.kept_a[i] - match.kept_b[i]);
    match.max_deviation = std::max(match.max_deviation, dev);
    if (dev > tol) {
      match.unmatched_a.push_back(match.kept_a[i]);
      match.unmatched_b.push_back(match.kept_b[i]);
    }
  }
  for (std::size_t i = common; i < na; ++i) match.unmatched_a.push_back(match.kept_a[i]);
  for (std::size_t i = common; i < nb; ++i) match.unmatched_b.push_back(match.kept_b[i]);
  match.matched = match.unmatched_a.empty() && match.unmatched_b.empty();
  return match;
}

}  // namespace mlfeti
