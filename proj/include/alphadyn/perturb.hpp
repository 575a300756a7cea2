// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "alphadyn/alpha.hpp"
#include "alphadyn/eigen3x3.hpp"
#include "alphadyn/errors.hpp"
#include "alphadyn/field.hpp"

namespace alphadyn {

// Band-limited truncation U^j, |k|_inf <= j.
inline FourierVectorField truncate_flow(const FourierVectorField& u, int j) {
  if (j < 0) throw ValidationError("truncation order must be >= 0");
  return truncate_to(u, j);
}

// The three explicit single-shell fields whose electromotive response is an
// exact diagonal: V^i lives on the axis wavevectors of size j+i that avoid
// coordinate i, e.g.
//   V^1 = (sin((j+1) t3) + cos((j+1) t2), cos((j+1) t3), sin((j+1) t2)).
// Each is real, zero-mean and divergence-free.
inline FourierVectorField build_v(int j, int i, int trunc = -1) {
  if (j < 0) throw ValidationError("j must be >= 0");
  if (i < 1 || i > 3) throw ValidationError("i must be 1, 2 or 3");
  const int f = j + i;
  const int K = trunc < 0 ? f : trunc;
  if (K < f) throw ValidationError("truncation too small for V^i");
  FourierVectorField v(TorusSpec::unit(K));
  const Complex half(0.5, 0.0);
  const Complex mi_half(0.0, -0.5);
  // Component roles rotate with i: comp a = i-1 carries sin(f t_c) + cos(f t_b),
  // comp b carries cos(f t_c), comp c carries sin(f t_b), with (a, b, c) the
  // cyclic triple starting at i-1.
  const int a = i - 1, b = (i % 3), c = ((i + 1) % 3);
  WaveVector kb{}, kc{};
  kb[b] = f;
  kc[c] = f;
  CVec3 vb{}, vc{};
  // Modes on axis b: cos(f t_b) in component a, sin(f t_b) in component c.
  vb[a] = half;
  vb[c] = mi_half;
  // Modes on axis c: sin(f t_c) in component a, cos(f t_c) in component b.
  vc[a] = mi_half;
  vc[b] = half;
  v.set(kb, vb);
  v.set(-kb, conj(vb));
  v.set(kc, vc);
  v.set(-kc, conj(vc));
  return v;
}

struct PerturbationPlan {
  int j = 0;
  std::array<double, 3> deltas{};
  FourierVectorField base;        // U^j
  FourierVectorField perturbed;   // U^j + sum_i delta_i V^i
  Mat3 alpha2_base;
  Mat3 alpha2_perturbed;
  double certificate_error = 0.0; // max-entry error of the diagonal-shift identity
  double gap = 0.0;               // achieved eigenvalue separation of sym(alpha2)
  double min_eig_abs = 0.0;
  double perturbation_l2 = 0.0;   // ||sum delta_i V^i||_L2
  std::vector<std::string> warnings;
};

// The diagonal shift produced by the V fields: since the response is
// quadratic in the flow, delta_i enters squared.
inline Mat3 v_shift(int j, const std::array<double, 3>& deltas) {
  Mat3 s{};
  for (int i = 1; i <= 3; ++i) {
    const double w = deltas[i - 1] * deltas[i - 1] / double(j + i);
    for (int r = 0; r < 3; ++r)
      if (r != i - 1) s(r, r) -= w;
  }
  return s;
}

inline PerturbationPlan perturb(const FourierVectorField& u, int j,
                                const std::array<double, 3>& deltas,
                                const Tolerances& tol = default_tolerances()) {
  for (double d : deltas)
    if (d < 0) throw ValidationError("deltas must be nonnegative");
  PerturbationPlan plan;
  plan.j = j;
  plan.deltas = deltas;
  const int K = std::max(j + 3, std::max(j, 1));
  plan.base = embed(truncate_flow(u, j), K);
  plan.perturbed = plan.base;
  FourierVectorField bump(TorusSpec::unit(K));
  for (int i = 1; i <= 3; ++i) {
    FourierVectorField vi = build_v(j, i, K);
    vi *= deltas[i - 1];
    bump += vi;
  }
  plan.perturbation_l2 = norm_l2(bump);
  plan.perturbed += bump;

  plan.alpha2_base = alpha2(plan.base, tol);
  plan.alpha2_perturbed = alpha2(plan.perturbed, tol);
  const Mat3 expected = plan.alpha2_base + v_shift(j, deltas);
  plan.certificate_error = max_abs(plan.alpha2_perturbed - expected);
  if (plan.certificate_error > 1e-12 * std::max(1.0, max_abs(plan.alpha2_perturbed)))
    throw NumericalError(NumericalError::Kind::CertificateFailed,
                         "perturbation shift identity violated by " +
                             std::to_string(plan.certificate_error));

  Mat3 sym, antisym;
  Vec3d gamma;
  split_symmetric(plan.alpha2_perturbed, sym, antisym, gamma);
  const SymEigen se = diagonalize_sym(sym);
  plan.gap = std::min({std::abs(se.eigs.x - se.eigs.y),
                       std::abs(se.eigs.y - se.eigs.z),
                       std::abs(se.eigs.x - se.eigs.z)});
  plan.min_eig_abs = std::min(
      {std::abs(se.eigs.x), std::abs(se.eigs.y), std::abs(se.eigs.z)});
  return plan;
}

// Smallest doubling-grid deltas (distinct per component) whose perturbed
// alpha2 has pairwise eigenvalue gaps and magnitudes >= g/2. Enumeration:
// exponent triples ordered by (sum, lexicographic), all components distinct.
inline PerturbationPlan choose_deltas(const FourierVectorField& u, int j, double g,
                                      const Tolerances& tol = default_tolerances()) {
  if (!(g > 0)) throw ValidationError("gap must be positive");
  constexpr int kMaxDoublings = 40;
  for (int total = 3; total <= 3 * kMaxDoublings; ++total) {
    for (int e1 = 0; e1 <= std::min(total, kMaxDoublings); ++e1)
      for (int e2 = 0; e2 <= std::min(total - e1, kMaxDoublings); ++e2) {
        const int e3 = total - e1 - e2;
        if (e3 > kMaxDoublings) continue;
        if (e1 == e2 || e2 == e3 || e1 == e3) continue;
        const std::array<double, 3> deltas{g * std::pow(2.0, e1),
                                           g * std::pow(2.0, e2),
                                           g * std::pow(2.0, e3)};
        PerturbationPlan plan = perturb(u, j, deltas, tol);
        if (plan.gap >= 0.5 * g && plan.min_eig_abs >= 0.5 * g) return plan;
      }
  }
  throw NumericalError(NumericalError::Kind::GapUnreachable,
                       "no doubling-grid deltas reached the requested gap");
}

// Re-verify distinctness on sym(alpha) at a working rm; the small-rm proxy
// can mislead when rm is not small.
inline void recheck_gap_at_rm(PerturbationPlan& plan, const AlphaTensor& at_rm,
                              double g) {
  const SymEigen se = diagonalize_sym(at_rm.sym);
  const double gap = std::min({std::abs(se.eigs.x - se.eigs.y),
                               std::abs(se.eigs.y - se.eigs.z),
                               std::abs(se.eigs.x - se.eigs.z)});
  const double expected = 0.25 * at_rm.rm * g;
  if (gap < expected)
    plan.warnings.push_back(
        "sym(alpha) separation at rm=" + std::to_string(at_rm.rm) + " is " +
        std::to_string(gap) + ", below the small-rm expectation " +
        std::to_string(expected));
}

}  // namespace alphadyn
