// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_KRYLOV_HPP
#define MLFETI_KRYLOV_HPP

#include <vector>

#include "mlfeti/linalg.hpp"

namespace mlfeti {

struct KrylovOptions {
  double tol = 1e-8;
  /// Iteration cap; a negative value means the system dimension (GMRES) or
  /// twice the dimension (PCG).
  Index max_iterations = -1;
  /// Probe operator and preconditioner for symmetry before PCG starts.
  bool check_symmetry = true;
};

struct KrylovReport {
  Index iterations = 0;
  std::vector<double> residual_history;  // relative residuals, starting with 1
  bool converged = false;
  Vector solution;
};

/// Preconditioned conjugate gradients from a zero initial guess.
/// Throws Error{invalid_argument} if a symmetry probe fails, Error{breakdown}
/// on nonpositive curvature and Error{no_convergence} at the iteration cap.
KrylovReport pcg(const LinearOperator& op, const LinearOperator& prec, const Vector& b,
                 const KrylovOptions& options = {});

/// Unrestarted right-preconditioned GMRES from a zero initial guess with
/// modified Gram-Schmidt and one reorthogonalization pass. The stopping test
/// uses the residual of the unpreconditioned system. Throws Error{stagnation}
/// at the iteration cap.
KrylovReport gmres_right(const LinearOperator& op, const LinearOperator& prec, const Vector& b,
                         const KrylovOptions& options = {});

/// Largest relative deviation |x'Ay - y'Ax| over a few fixed probe pairs.
[[nodiscard]] double symmetry_defect(const LinearOperator& op, int probes = 3);

}  // namespace mlfeti

#endif  // MLFETI_KRYLOV_HPP
