// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace alphadyn {

// Every tolerance and iteration cap used by the library, in one record.
// Callers that need a nonstandard setting copy the default and adjust.
struct Tolerances {
  double algebraic = 1e-10;         // closed-form identities, realification checks
  double iterative = 1e-8;          // accepted residual of iterative solves
  double reality = 1e-12;           // conjugate-symmetry slack
  double gmres_rel = 1e-12;         // relative residual target of inner solves
  int gmres_restart = 60;
  int gmres_maxiter = 4000;
  double eigen_residual = 1e-8;     // ||Av - mu v|| <= eigen_residual * ||v||
  int eigen_maxiter = 500;
  double series_stop_rel = 1e-12;   // series converged when last term is this small
  double near_singular_cond = 1e12; // condition estimate that flags R_m in the bad set
  int power_maxiter = 400;          // spectral-radius power iterations
  double power_tol = 1e-10;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace alphadyn
