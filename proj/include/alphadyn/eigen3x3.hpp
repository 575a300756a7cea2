// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "alphadyn/alpha.hpp"
#include "alphadyn/errors.hpp"
#include "alphadyn/rational.hpp"
#include "alphadyn/vec3.hpp"

namespace alphadyn {

// i xi ^ b as a (skew-Hermitian) matrix. xi is the large-scale direction in
// angular units: the physical modulation wavevector is eps * xi.
inline CMat3 a_xi(const Vec3d& xi) {
  CMat3 a;
  const Complex i(0, 1);
  a(0, 1) = -i * xi.z;
  a(0, 2) = i * xi.y;
  a(1, 0) = i * xi.z;
  a(1, 2) = -i * xi.x;
  a(2, 0) = -i * xi.y;
  a(2, 1) = i * xi.x;
  return a;
}

struct SymEigen {
  Mat3 p;          // orthogonal, det +1, columns are eigenvectors
  Vec3d eigs{};    // descending
};

// Cyclic Jacobi rotations on a symmetric 3x3. Deterministic: fixed sweep
// order, eigenvalues sorted descending, the first nonzero component of
// columns 1-2 made positive, column 3 = col1 ^ col2 so det(P) = +1.
inline SymEigen diagonalize_sym(const Mat3& s_in) {
  Mat3 a = s_in;
  Mat3 v = Mat3::identity();
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Mat3 r = Mat3::identity();
        r(p, p) = c;
        r(q, q) = c;
        r(p, q) = s;
        r(q, p) = -s;
        a = r.transpose() * a * r;
        v = v * r;
      }
  }
  // Sort descending, carrying columns.
  std::array<int, 3> ord{0, 1, 2};
  std::sort(ord.begin(), ord.end(),
            [&](int i, int j) { return a(i, i) > a(j, j); });
  SymEigen out;
  for (int c = 0; c < 3; ++c) {
    out.eigs[c] = a(ord[c], ord[c]);
    for (int r = 0; r < 3; ++r) out.p(r, c) = v(r, ord[c]);
  }
  for (int c = 0; c < 2; ++c) {
    for (int r = 0; r < 3; ++r) {
      if (std::abs(out.p(r, c)) < 1e-14) continue;
      if (out.p(r, c) < 0)
        for (int rr = 0; rr < 3; ++rr) out.p(rr, c) = -out.p(rr, c);
      break;
    }
  }
  const Vec3d c0{out.p(0, 0), out.p(1, 0), out.p(2, 0)};
  const Vec3d c1{out.p(0, 1), out.p(1, 1), out.p(2, 1)};
  const Vec3d c2 = cross(c0, c1);
  for (int r = 0; r < 3; ++r) out.p(r, 2) = c2[r];
  return out;
}

// lambda_pm = +-sqrt(z1^2 a2 a3 + z2^2 a3 a1 + z3^2 a1 a2) where defined.
inline double spectral_discriminant(const Vec3d& zeta, const Vec3d& alphas) {
  return zeta.x * zeta.x * alphas.y * alphas.z +
         zeta.y * zeta.y * alphas.z * alphas.x +
         zeta.z * zeta.z * alphas.x * alphas.y;
}

inline bool in_cone(const Vec3d& zeta, const Vec3d& alphas) {
  return spectral_discriminant(zeta, alphas) > 0.0;
}

inline std::pair<Complex, Complex> lambda_pm(const Vec3d& zeta, const Vec3d& alphas) {
  const double s = spectral_discriminant(zeta, alphas);
  if (s >= 0.0) {
    const double r = std::sqrt(s);
    return {Complex(r, 0), Complex(-r, 0)};
  }
  const double r = std::sqrt(-s);
  return {Complex(0, r), Complex(0, -r)};
}

// Predicted long-wave unstable mode of a flow with electromotive tensor
// alpha at large-scale direction xi.
struct LargeScaleMode {
  RationalVec3 xi;       // exact rational direction
  Vec3d xi_value{};      // numeric xi
  Mat3 p;                // diagonalizer of sym(alpha), det +1
  Vec3d alphas{};        // eigenvalues of sym(alpha), descending
  Vec3d zeta{};          // transpose(P) xi
  Vec3d gamma_rot{};     // axial vector in the diagonal frame
  double lambda_plus = 0.0;
  CVec3 beta{};          // eigenvector in the diagonal frame, zeta . beta = 0
  CVec3 mode_vector{};   // P beta, eigenvector of a_xi(xi) * alpha
  Complex rate{};        // lambda_plus - i (zeta . gamma_rot)
  double residual = 0.0; // ||(a_xi alpha - rate) mode_vector||
  std::string selection; // how xi was chosen
};

namespace detail {

// Deterministic null-space direction of a complex 3x3: largest pairwise
// cross product of rows, lexicographic tie-break, deterministic phase.
inline CVec3 nullspace_direction(const CMat3& m) {
  std::array<CVec3, 3> rows;
  for (int r = 0; r < 3; ++r) rows[r] = {m(r, 0), m(r, 1), m(r, 2)};
  CVec3 best{};
  double best_norm = -1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const CVec3 c = cross(rows[i], rows[j]);
      const double n = norm2(c);
      if (n > best_norm + 1e-15 * std::max(best_norm, 1.0)) {
        best_norm = n;
        best = c;
      }
    }
  if (best_norm <= 0.0)
    throw NumericalError(NumericalError::Kind::DegenerateAlpha,
                         "null space construction degenerated");
  // Normalize with a deterministic phase: largest component real positive.
  int arg = 0;
  double amax = -1.0;
  for (int c = 0; c < 3; ++c)
    if (std::abs(best[c]) > amax + 1e-15) {
      amax = std::abs(best[c]);
      arg = c;
    }
  const Complex phase = best[arg] / std::abs(best[arg]);
  const double n = norm2(best);
  for (int c = 0; c < 3; ++c) best[c] /= (phase * n);
  return best;
}

}  // namespace detail

inline LargeScaleMode predict_mode(const AlphaTensor& alpha, const RationalVec3& xi,
                                   const Tolerances& tol = default_tolerances()) {
  LargeScaleMode mode;
  mode.xi = xi;
  mode.xi_value = value(xi);
  const SymEigen se = diagonalize_sym(alpha.sym);
  mode.p = se.p;
  mode.alphas = se.eigs;
  const double scale = std::max(
      {std::abs(se.eigs.x), std::abs(se.eigs.y), std::abs(se.eigs.z)});
  if (scale == 0.0)
    throw NumericalError(NumericalError::Kind::DegenerateAlpha,
                         "sym(alpha) vanishes");
  const double gap = std::min({std::abs(se.eigs.x - se.eigs.y),
                               std::abs(se.eigs.y - se.eigs.z),
                               std::abs(se.eigs.x), std::abs(se.eigs.y),
                               std::abs(se.eigs.z)});
  if (gap < 1e-12 * scale)
    throw NumericalError(NumericalError::Kind::DegenerateAlpha,
                         "sym(alpha) eigenvalues not distinct nonzero");
  mode.zeta = mode.p.transpose() * mode.xi_value;
  const double s = spectral_discriminant(mode.zeta, mode.alphas);
  if (!(s > 0.0))
    throw NumericalError(NumericalError::Kind::OutsideCone,
                         "xi lies outside the growth region");
  mode.lambda_plus = std::sqrt(s);
  // Axial vector of the rotated antisymmetric part.
  Mat3 asym_rot = mode.p.transpose() * alpha.antisym * mode.p;
  mode.gamma_rot = {asym_rot(2, 1), asym_rot(0, 2), asym_rot(1, 0)};
  mode.rate = Complex(mode.lambda_plus, -dot(mode.zeta, mode.gamma_rot));

  // beta spans the null space of (a_zeta D - lambda_plus I).
  Mat3 d{};
  d(0, 0) = mode.alphas.x;
  d(1, 1) = mode.alphas.y;
  d(2, 2) = mode.alphas.z;
  CMat3 m = a_xi(mode.zeta) * to_complex(d);
  for (int r = 0; r < 3; ++r) m(r, r) -= mode.lambda_plus;
  mode.beta = detail::nullspace_direction(m);
  mode.mode_vector = to_complex(mode.p) * mode.beta;

  const CMat3 full = a_xi(mode.xi_value) * to_complex(alpha.alpha);
  CVec3 r = full * mode.mode_vector - mode.rate * mode.mode_vector;
  mode.residual = norm2(r);
  if (mode.residual > 100 * tol.algebraic)
    throw NumericalError(NumericalError::Kind::DegenerateAlpha,
                         "predicted mode residual " + std::to_string(mode.residual));
  return mode;
}

struct XiSearchSpec {
  int q_max = 8;          // denominator bound
  int p_max = 8;          // numerator bound
};

// Deterministic scan of strictly positive rational directions maximizing
// lambda_plus / |xi|; the first maximizer in lexicographic enumeration
// order wins.
inline LargeScaleMode find_xi(const AlphaTensor& alpha, const XiSearchSpec& search,
                              const Tolerances& tol = default_tolerances()) {
  const SymEigen se = diagonalize_sym(alpha.sym);
  const double scale = std::max(
      {std::abs(se.eigs.x), std::abs(se.eigs.y), std::abs(se.eigs.z)});
  const double gap = std::min({std::abs(se.eigs.x - se.eigs.y),
                               std::abs(se.eigs.y - se.eigs.z),
                               std::abs(se.eigs.x), std::abs(se.eigs.y),
                               std::abs(se.eigs.z)});
  if (scale == 0.0 || gap < 1e-12 * scale)
    throw NumericalError(NumericalError::Kind::DegenerateAlpha,
                         "sym(alpha) eigenvalues not distinct nonzero");

  std::set<std::array<std::int64_t, 3>> seen;
  bool found = false;
  RationalVec3 best{};
  double best_score = 0.0;
  for (int q1 = 1; q1 <= search.q_max; ++q1)
    for (int p1 = 1; p1 <= search.p_max; ++p1)
      for (int q2 = 1; q2 <= search.q_max; ++q2)
        for (int p2 = 1; p2 <= search.p_max; ++p2)
          for (int q3 = 1; q3 <= search.q_max; ++q3)
            for (int p3 = 1; p3 <= search.p_max; ++p3) {
              RationalVec3 xi{Rational(p1, q1), Rational(p2, q2), Rational(p3, q3)};
              // Canonical integer direction for scale-duplicate skipping.
              std::array<std::int64_t, 3> dir{
                  xi[0].num * xi[1].den * xi[2].den,
                  xi[1].num * xi[0].den * xi[2].den,
                  xi[2].num * xi[0].den * xi[1].den};
              const std::int64_t g = std::gcd(std::gcd(dir[0], dir[1]), dir[2]);
              for (auto& d : dir) d /= g;
              if (!seen.insert(dir).second) continue;
              const Vec3d x = value(xi);
              const Vec3d zeta = se.p.transpose() * x;
              const double s = spectral_discriminant(zeta, se.eigs);
              if (!(s > 0.0)) continue;
              const double score = std::sqrt(s) / norm2(x);
              if (score > best_score * (1.0 + 1e-12)) {
                best_score = score;
                best = xi;
                found = true;
              }
            }
  if (!found)
    throw NumericalError(NumericalError::Kind::NoViableXi,
                         "no scanned rational direction lies in the growth region");
  LargeScaleMode mode = predict_mode(alpha, best, tol);
  mode.selection = "max lambda_plus/|xi| over p/q <= " +
                   std::to_string(search.p_max) + "/" + std::to_string(search.q_max);
  return mode;
}

}  // namespace alphadyn
