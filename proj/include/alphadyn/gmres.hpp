// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "alphadyn/vec3.hpp"

namespace alphadyn {

using CVector = std::vector<Complex>;

inline Complex vdot(const CVector& a, const CVector& b) {
  Complex s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double vnorm(const CVector& a) {
  double s = 0;
  for (const auto& v : a) s += std::norm(v);
  return std::sqrt(s);
}

inline void vaxpy(CVector& y, Complex alpha, const CVector& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline void vscale(CVector& y, Complex alpha) {
  for (auto& v : y) v *= alpha;
}

struct GmresResult {
  bool converged = false;
  int iterations = 0;
  double rel_residual = 0.0;
};

using ApplyFn = std::function<void(const CVector&, CVector&)>;

// Restarted GMRES with right preconditioning: solves A x = b by running
// Arnoldi on A M and setting x = M y. Modified Gram-Schmidt with Givens
// rotations; fully deterministic.
inline GmresResult gmres(const ApplyFn& apply_a, const ApplyFn& apply_m,
                         const CVector& b, CVector& x, double rel_tol,
                         int restart, int maxiter) {
  const std::size_t n = b.size();
  const double bnorm = vnorm(b);
  GmresResult res;
  if (bnorm == 0.0) {
    x.assign(n, Complex(0.0));
    res.converged = true;
    return res;
  }
  if (x.size() != n) x.assign(n, Complex(0.0));

  CVector r(n), w(n), mz(n);
  std::vector<CVector> V;
  int total_it = 0;

  while (total_it < maxiter) {
    // r = b - A x
    apply_a(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double beta = vnorm(r);
    res.rel_residual = beta / bnorm;
    if (res.rel_residual <= rel_tol) {
      res.converged = true;
      res.iterations = total_it;
      return res;
    }

    const int m = restart;
    V.assign(1, r);
    vscale(V[0], 1.0 / beta);
    std::vector<std::vector<Complex>> H(m + 1, std::vector<Complex>(m, Complex(0.0)));
    std::vector<Complex> cs(m), sn(m), g(m + 1, Complex(0.0));
    g[0] = beta;

    int j = 0;
    for (; j < m && total_it < maxiter; ++j, ++total_it) {
      apply_m(V[j], mz);
      apply_a(mz, w);
      for (int i = 0; i <= j; ++i) {
        H[i][j] = vdot(V[i], w);
        vaxpy(w, -H[i][j], V[i]);
      }
      H[j + 1][j] = vnorm(w);
      if (std::abs(H[j + 1][j]) > 0.0) {
        CVector vnext = w;
        vscale(vnext, 1.0 / H[j + 1][j].real());
        V.push_back(std::move(vnext));
      }
      // Apply stored rotations, then form the new one.
      for (int i = 0; i < j; ++i) {
        const Complex t = std::conj(cs[i]) * H[i][j] + std::conj(sn[i]) * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double denom =
          std::sqrt(std::norm(H[j][j]) + std::norm(H[j + 1][j]));
      if (denom == 0.0) break;
      cs[j] = H[j][j] / denom;
      sn[j] = H[j + 1][j] / denom;
      H[j][j] = Complex(denom);
      H[j + 1][j] = 0.0;
      const Complex t = std::conj(cs[j]) * g[j];
      g[j + 1] = -sn[j] * g[j];
      g[j] = t;

      res.rel_residual = std::abs(g[j + 1]) / bnorm;
      if (res.rel_residual <= rel_tol) {
        ++j;
        break;
      }
      if (std::abs(H[j][j]) == 0.0) break;
    }

    // Back substitution on the j x j triangle.
    std::vector<Complex> y(j, Complex(0.0));
    for (int i = j - 1; i >= 0; --i) {
      Complex s = g[i];
      for (int l = i + 1; l < j; ++l) s -= H[i][l] * y[l];
      y[i] = s / H[i][i];
    }
    CVector z(n, Complex(0.0));
    for (int i = 0; i < j; ++i) vaxpy(z, y[i], V[i]);
    apply_m(z, mz);
    for (std::size_t i = 0; i < n; ++i) x[i] += mz[i];

    if (res.rel_residual <= rel_tol) {
      res.converged = true;
      res.iterations = total_it;
      return res;
    }
    if (j == 0) break;  // breakdown
  }
  res.iterations = total_it;
  // Final true residual.
  apply_a(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  res.rel_residual = vnorm(r) / bnorm;
  res.converged = res.rel_residual <= rel_tol;
  return res;
}

}  // namespace alphadyn
