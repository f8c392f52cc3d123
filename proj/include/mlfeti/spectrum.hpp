// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_SPECTRUM_HPP
#define MLFETI_SPECTRUM_HPP

#include <complex>
#include <string_view>
#include <vector>

#include "mlfeti/linalg.hpp"
#include "mlfeti/parallel.hpp"

namespace mlfeti {

using Complex = std::complex<double>;

enum class SpectrumMethod { dense, arnoldi };

std::string_view to_string(SpectrumMethod method);

struct SpectrumReport {
  std::vector<Complex> eigenvalues;  // by magnitude, descending
  SpectrumMethod method = SpectrumMethod::dense;
  Index requested = 0;
};

/// Sorts by magnitude, descending; ties by real part, then imaginary part.
void sort_by_magnitude(std::vector<Complex>& values);

/// All eigenvalues of the materialized operator, or the `k` largest in
/// magnitude when k >= 0. Throws Error{too_large} above `guard`.
SpectrumReport dense_spectrum(const LinearOperator& op, Index k = -1, Execution exec = Execution::serial,
                              Index guard = kMaterializeGuard);

struct ArnoldiOptions {
  double tol = 1e-10;          // relative Ritz residual
  Index max_dimension = -1;    // default: operator size
  Index check_every = 5;
  unsigned seed = 20260501;
};

/// The k largest-magnitude Ritz values of an unrestarted Arnoldi process.
/// Throws Error{no_convergence} if they have not converged at max_dimension.
SpectrumReport arnoldi_topk(const LinearOperator& op, Index k, const ArnoldiOptions& options = {});

struct SpectrumMatch {
  bool matched = false;
  std::vector<Complex> kept_a;
  std::vector<Complex> kept_b;
  std::vector<Complex> unmatched_a;
  std::vector<Complex> unmatched_b;
  double max_deviation = 0.0;
};

/// Removes values within `drop_tol` of 0 or 1 from both lists and compares
/// what remains pairwise in magnitude order with tolerance `tol`. With
/// `compare_count` >= 0 only that many leading entries take part.
SpectrumMatch compare_spectra(const SpectrumReport& a, const SpectrumReport& b, double drop_tol, double tol,
                              Index compare_count = -1);

}  // namespace mlfeti

#endif  // MLFETI_SPECTRUM_HPP
