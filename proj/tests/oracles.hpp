// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used only by tests: direct DFT
// collocation (no FFT library), dense operator assembly (Eigen), and
// closed-form 3x3 eigenvalues. These deliberately avoid the library's
// convolution and solver code paths.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <vector>

#include "alphadyn/field.hpp"
#include "alphadyn/torus.hpp"

namespace oracle {

using alphadyn::Complex;
using alphadyn::CVec3;
using alphadyn::FourierVectorField;
using alphadyn::TorusSpec;
using alphadyn::Vec3d;
using alphadyn::WaveVector;

// Pointwise values of a truncated series by direct summation at the uniform
// grid node (2*pi*T_i) * (i_a / n_a).
inline CVec3 evaluate_at(const FourierVectorField& f, const Vec3d& theta) {
  CVec3 sum{};
  alphadyn::detail::for_each_mode(f.spec(), [&](const WaveVector& k) {
    const Vec3d kap = f.spec().angular(k);
    const Complex phase =
        std::exp(Complex(0, kap.x * theta.x + kap.y * theta.y + kap.z * theta.z));
    sum += phase * f.at(k);
  });
  return sum;
}

// Coefficients of the pointwise cross product U ^ B computed by direct
// quadrature on an n^3 grid (exact for trig polynomials when n is large
// enough to avoid aliasing back onto the retained cube).
inline FourierVectorField collocation_cross(const FourierVectorField& u,
                                            const FourierVectorField& b, int n) {
  const TorusSpec& s = u.spec();
  std::vector<CVec3> values(std::size_t(n) * n * n);
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        const Vec3d theta{2 * M_PI * s.periods[0] * i0 / n,
                          2 * M_PI * s.periods[1] * i1 / n,
                          2 * M_PI * s.periods[2] * i2 / n};
        values[(std::size_t(i0) * n + i1) * n + i2] =
            cross(evaluate_at(u, theta), evaluate_at(b, theta));
      }
  FourierVectorField out(s);
  alphadyn::detail::for_each_mode(s, [&](const WaveVector& k) {
    CVec3 acc{};
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
          const double ang = -2 * M_PI *
                             (double(k[0]) * i0 + double(k[1]) * i1 +
                              double(k[2]) * i2) /
                             n;
          acc += std::exp(Complex(0, ang)) *
                 values[(std::size_t(i0) * n + i1) * n + i2];
        }
    out.set(k, (1.0 / double(n) / n / n) * acc);
  });
  return out;
}

// Mean-square of |f| by direct grid quadrature.
inline double quadrature_l2(const FourierVectorField& f, int n) {
  const TorusSpec& s = f.spec();
  double acc = 0;
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        const Vec3d theta{2 * M_PI * s.periods[0] * i0 / n,
                          2 * M_PI * s.periods[1] * i1 / n,
                          2 * M_PI * s.periods[2] * i2 / n};
        const CVec3 v = evaluate_at(f, theta);
        acc += std::norm(v.x) + std::norm(v.y) + std::norm(v.z);
      }
  return std::sqrt(acc / double(n) / n / n);
}

// Dense matrix of the modulated induction operator on the truncation cube:
// row blocks are output modes. Assembled entrywise from the flow
// coefficients, independent of the library's convolution.
inline Eigen::MatrixXcd dense_induction(const FourierVectorField& u, double rm,
                                        const Vec3d& xi, double eps, int K) {
  const TorusSpec s(u.spec().periods, K);
  const auto m = s.modes();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3 * m, 3 * m);
  const Complex i1(0, 1);
  for (std::int64_t row = 0; row < m; ++row) {
    const WaveVector k = s.wavevector_at(row);
    Vec3d q = s.angular(k);
    q = {q.x + eps * xi.x, q.y + eps * xi.y, q.z + eps * xi.z};
    for (std::int64_t col = 0; col < m; ++col) {
      const WaveVector kp = s.wavevector_at(col);
      const WaveVector d{k[0] - kp[0], k[1] - kp[1], k[2] - kp[2]};
      const CVec3 ud = u.at(d);
      // block = i q ^ (ud ^ .) = (iq) ud^T . - (iq . ud) I  ... expanded
      // directly through basis vectors to stay foolproof.
      for (int c = 0; c < 3; ++c) {
        CVec3 e{};
        e[c] = 1.0;
        const CVec3 outv = cross(CVec3{i1 * q.x, i1 * q.y, i1 * q.z}, cross(ud, e));
        for (int r = 0; r < 3; ++r) a(r * m + row, c * m + col) += outv[r];
      }
    }
    const double diff = dot(q, q) / rm;
    for (int r = 0; r < 3; ++r) a(r * m + row, r * m + row) -= diff;
  }
  return a;
}

// Roots of det(M - lambda I) for a complex 3x3, via Eigen.
inline std::vector<Complex> eig3(const alphadyn::CMat3& m) {
  Eigen::Matrix3cd em;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) em(r, c) = m(r, c);
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(em);
  return {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
}

// Real symmetric 3x3 eigenvalues by the trigonometric closed form of the
// characteristic polynomial (descending).
inline std::array<double, 3> sym_eigs_closed_form(const alphadyn::Mat3& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double tr = a(0, 0) + a(1, 1) + a(2, 2);
  std::array<double, 3> out;
  if (p1 == 0.0) {
    out = {a(0, 0), a(1, 1), a(2, 2)};
  } else {
    const double q = tr / 3.0;
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                      (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    alphadyn::Mat3 b = a;
    for (int i = 0; i < 3; ++i) b(i, i) -= q;
    const double detb =
        b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
        b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
        b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double r = std::clamp(detb / (2.0 * p * p * p), -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    out[0] = q + 2.0 * p * std::cos(phi);
    out[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    out[1] = tr - out[0] - out[2];
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// Random real, zero-mean field supported in |k|_inf <= support; divergence
// free unless solenoidal = false. Deterministic in the seed.
inline FourierVectorField random_field(int K, int support, std::uint64_t seed,
                                       bool solenoidal = true) {
  FourierVectorField f(TorusSpec::unit(K));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  alphadyn::detail::for_each_mode(TorusSpec::unit(support), [&](const WaveVector& k) {
    if (k[0] == 0 && k[1] == 0 && k[2] == 0) return;
    CVec3 v{Complex(dist(rng), dist(rng)), Complex(dist(rng), dist(rng)),
            Complex(dist(rng), dist(rng))};
    f.set(k, v);
  });
  alphadyn::enforce_reality(f);
  if (solenoidal) f = alphadyn::leray_project(f);
  return f;
}

}  // namespace oracle
