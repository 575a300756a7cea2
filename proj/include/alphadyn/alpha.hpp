// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "alphadyn/convolve.hpp"
#include "alphadyn/errors.hpp"
#include "alphadyn/field.hpp"
#include "alphadyn/gmres.hpp"
#include "alphadyn/tolerances.hpp"

namespace alphadyn {

// Mean-field electromotive tensor of a flow at magnetic Reynolds number rm,
// with its symmetric/antisymmetric split and axial vector gamma
// (antisym * b == gamma ^ b).
struct AlphaTensor {
  Mat3 alpha;
  Mat3 sym;
  Mat3 antisym;
  Vec3d gamma{};
  double rm = 0.0;
  std::string method;

  struct Diagnostics {
    double imag_residue = 0.0;        // largest imaginary part seen before realifying
    double cond_estimate = 0.0;       // truncated-system condition estimate (direct)
    double rm0 = 0.0;                 // 1/spectral radius of the series operator
    double corrector_residual = 0.0;  // worst relative residual of the three solves
    std::vector<double> term_norms;   // per-term Frobenius norms (series)
    bool series_converged = false;
  } diag;
};

inline void split_symmetric(const Mat3& a, Mat3& sym, Mat3& antisym, Vec3d& gamma) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      sym(r, c) = 0.5 * (a(r, c) + a(c, r));
      antisym(r, c) = 0.5 * (a(r, c) - a(c, r));
    }
  gamma = {antisym(2, 1), antisym(0, 2), antisym(1, 0)};
}

inline void decompose(AlphaTensor& t) {
  split_symmetric(t.alpha, t.sym, t.antisym, t.gamma);
}

inline AlphaTensor make_alpha_tensor(const Mat3& a, double rm, std::string method) {
  AlphaTensor t;
  t.alpha = a;
  t.rm = rm;
  t.method = std::move(method);
  decompose(t);
  return t;
}

// Shared spectral workspace for the unit-torus operators: the flow cached on
// the padded grid plus angular-wavevector tables over the truncation cube.
class AlphaWorkspace {
public:
  AlphaWorkspace(const FourierVectorField& U, int K)
      : spec_(U.spec().periods, K), u_(embed(U, K)), conv_(u_, spec_) {
    if (U.spec().periods != std::array<double, 3>{1.0, 1.0, 1.0})
      throw ValidationError("alpha operators are defined on the unit torus");
    const auto m = spec_.modes();
    kap_.resize(m);
    k2_.resize(m);
    for (std::int64_t i = 0; i < m; ++i) {
      const auto k = spec_.wavevector_at(i);
      kap_[i] = spec_.angular(k);
      k2_[i] = dot(kap_[i], kap_[i]);
    }
    zero_index_ = spec_.index({0, 0, 0});
  }

  const TorusSpec& spec() const { return spec_; }
  const FourierVectorField& flow() const { return u_; }
  std::int64_t size() const { return 3 * spec_.modes(); }

  // hat(U ^ f) over the cube.
  void cross_flow(const CVector& f, CVector& out) const {
    conv_.cross_with_flow(f.data(), out.data());
  }

  // Compact operator of the resolvent series: -inv_laplacian(curl(U ^ f)),
  // zero-mean output by construction.
  void apply_series_op(const CVector& f, CVector& out) const {
    cross_flow(f, scratch_);
    const auto m = spec_.modes();
    for (std::int64_t i = 0; i < m; ++i) {
      if (i == zero_index_) {
        out[i] = out[i + m] = out[i + 2 * m] = 0.0;
        continue;
      }
      const CVec3 g{scratch_[i], scratch_[i + m], scratch_[i + 2 * m]};
      const CVec3 ik{Complex(0, kap_[i].x), Complex(0, kap_[i].y),
                     Complex(0, kap_[i].z)};
      const CVec3 v = (1.0 / k2_[i]) * cross(ik, g);
      out[i] = v.x;
      out[i + m] = v.y;
      out[i + 2 * m] = v.z;
    }
  }

  // Dissipative corrector operator laplacian(f)/rm + curl(U ^ f) on the
  // zero-mean subspace (the k = 0 slot is projected out).
  void apply_corrector_op(const CVector& f, double rm, CVector& out) const {
    cross_flow(f, scratch_);
    const auto m = spec_.modes();
    for (std::int64_t i = 0; i < m; ++i) {
      if (i == zero_index_) {
        out[i] = out[i + m] = out[i + 2 * m] = 0.0;
        continue;
      }
      const CVec3 g{scratch_[i], scratch_[i + m], scratch_[i + 2 * m]};
      const CVec3 ik{Complex(0, kap_[i].x), Complex(0, kap_[i].y),
                     Complex(0, kap_[i].z)};
      const CVec3 v = cross(ik, g);
      out[i] = v.x - k2_[i] / rm * f[i];
      out[i + m] = v.y - k2_[i] / rm * f[i + m];
      out[i + 2 * m] = v.z - k2_[i] / rm * f[i + 2 * m];
    }
  }

  // Inverse diffusion preconditioner rm * inv_laplacian.
  void apply_preconditioner(const CVector& f, double rm, CVector& out) const {
    const auto m = spec_.modes();
    for (std::int64_t i = 0; i < m; ++i) {
      const double s = (i == zero_index_) ? 0.0 : -rm / k2_[i];
      out[i] = s * f[i];
      out[i + m] = s * f[i + m];
      out[i + 2 * m] = s * f[i + 2 * m];
    }
  }

  // mean(U ^ f) as an exact coefficient sum.
  CVec3 mean_cross_flow(const CVector& f) const {
    const auto m = spec_.modes();
    CVec3 s{};
    for (std::int64_t i = 0; i < m; ++i) {
      const auto k = spec_.wavevector_at(i);
      const CVec3 uk = u_.at(-k);
      const CVec3 fk{f[i], f[i + m], f[i + 2 * m]};
      s += cross(uk, fk);
    }
    return s;
  }

  CVector constant_vector(const Vec3d& b) const {
    CVector v(size(), Complex(0.0));
    const auto m = spec_.modes();
    v[zero_index_] = b.x;
    v[zero_index_ + m] = b.y;
    v[zero_index_ + 2 * m] = b.z;
    return v;
  }

  FourierVectorField to_field(const CVector& v) const {
    FourierVectorField f(spec_);
    f.raw() = v;
    return f;
  }

  CVector seeded_vector(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CVector v(size());
    for (auto& z : v) z = Complex(dist(rng), dist(rng));
    const auto m = spec_.modes();
    v[zero_index_] = v[zero_index_ + m] = v[zero_index_ + 2 * m] = 0.0;
    return v;
  }

private:
  TorusSpec spec_;
  FourierVectorField u_;
  mutable FlowConvolver conv_;
  std::vector<Vec3d> kap_;
  std::vector<double> k2_;
  std::int64_t zero_index_ = 0;
  mutable CVector scratch_{CVector(size_t(3) * spec_.modes(), Complex(0.0))};
};

struct SeriesRadius {
  double rho = 0.0;  // spectral radius of the series operator
  double rm0 = 0.0;  // inverse radius: the small-rm threshold
  int iterations = 0;
};

// Power iteration for the spectral radius of the compact series operator;
// norm ratios are averaged in pairs so complex conjugate dominant pairs
// settle too.
inline SeriesRadius estimate_rm0(const AlphaWorkspace& ws,
                                 const Tolerances& tol = default_tolerances()) {
  CVector v = ws.seeded_vector(0x5eed5eedULL);
  double nv = vnorm(v);
  vscale(v, 1.0 / nv);
  CVector w(v.size());
  double prev_ratio = 0.0, rho = 0.0, last = 0.0;
  SeriesRadius out;
  for (int it = 0; it < tol.power_maxiter; ++it) {
    ws.apply_series_op(v, w);
    const double s = vnorm(w);
    if (s == 0.0) throw NumericalError(NumericalError::Kind::NoConvergence,
                                       "series operator annihilated the probe");
    rho = (it == 0) ? s : std::sqrt(s * last);
    last = s;
    vscale(w, 1.0 / s);
    std::swap(v, w);
    out.iterations = it + 1;
    if (it > 4 && std::abs(rho - prev_ratio) < tol.power_tol * rho) break;
    prev_ratio = rho;
  }
  out.rho = rho;
  out.rm0 = 1.0 / rho;
  return out;
}

// Zero-mean corrector field responding to a constant mean field b.
struct CorrectorSolve {
  Vec3d mean_field{};
  FourierVectorField corrector;
  double residual = 0.0;       // ||L b~ + curl(U ^ b)|| / ||b||
  double cond_estimate = 0.0;  // 0 when not requested
  int iterations = 0;
};

namespace detail {

inline CVector corrector_rhs(const AlphaWorkspace& ws, const Vec3d& b) {
  // -curl(U ^ b) for constant b, assembled directly from the flow modes.
  const auto& s = ws.spec();
  const auto m = s.modes();
  CVector rhs(ws.size(), Complex(0.0));
  for (std::int64_t i = 0; i < m; ++i) {
    const auto k = s.wavevector_at(i);
    if (k[0] == 0 && k[1] == 0 && k[2] == 0) continue;
    const Vec3d kap = s.angular(k);
    const CVec3 ik{Complex(0, kap.x), Complex(0, kap.y), Complex(0, kap.z)};
    const CVec3 v = -1.0 * cross(ik, cross(ws.flow().at(k), to_complex(b)));
    rhs[i] = v.x;
    rhs[i + m] = v.y;
    rhs[i + 2 * m] = v.z;
  }
  return rhs;
}

inline GmresResult corrector_gmres(const AlphaWorkspace& ws, double rm,
                                   const CVector& rhs, CVector& x,
                                   const Tolerances& tol) {
  auto apply = [&](const CVector& in, CVector& out) {
    ws.apply_corrector_op(in, rm, out);
  };
  auto precond = [&](const CVector& in, CVector& out) {
    ws.apply_preconditioner(in, rm, out);
  };
  return gmres(apply, precond, rhs, x, tol.gmres_rel, tol.gmres_restart,
               tol.gmres_maxiter);
}

// Condition estimate of the truncated corrector system: power iteration for
// the largest eigenvalue magnitude, inverse iteration (reusing the solver)
// for the smallest.
inline double condition_estimate(const AlphaWorkspace& ws, double rm,
                                 const Tolerances& tol) {
  CVector v = ws.seeded_vector(0xc0ffeeULL);
  vscale(v, 1.0 / vnorm(v));
  CVector w(v.size());
  double hi = 0.0;
  for (int it = 0; it < 8; ++it) {
    ws.apply_corrector_op(v, rm, w);
    hi = vnorm(w);
    vscale(w, 1.0 / hi);
    std::swap(v, w);
  }
  v = ws.seeded_vector(0xfeedULL);
  vscale(v, 1.0 / vnorm(v));
  CVector x(v.size(), Complex(0.0));
  double inv_lo = 1.0;
  for (int it = 0; it < 5; ++it) {
    x.assign(x.size(), Complex(0.0));
    const auto r = corrector_gmres(ws, rm, v, x, tol);
    if (!r.converged) return std::numeric_limits<double>::infinity();
    inv_lo = vnorm(x);
    vscale(x, 1.0 / inv_lo);
    std::swap(v, x);
  }
  return hi * inv_lo;
}

}  // namespace detail

inline CorrectorSolve solve_corrector(const AlphaWorkspace& ws, double rm,
                                      const Vec3d& b, bool with_condition = false,
                                      const Tolerances& tol = default_tolerances()) {
  if (!(rm > 0.0)) throw ValidationError("rm must be positive");
  CorrectorSolve out;
  out.mean_field = b;
  const double bn = norm2(b);
  if (bn == 0.0 || norm_l2(ws.flow()) == 0.0) {
    out.corrector = FourierVectorField(ws.spec());
    return out;
  }
  const CVector rhs = detail::corrector_rhs(ws, b);
  CVector x(ws.size(), Complex(0.0));
  const auto res = detail::corrector_gmres(ws, rm, rhs, x, tol);
  out.iterations = res.iterations;
  if (with_condition) {
    out.cond_estimate = detail::condition_estimate(ws, rm, tol);
    if (out.cond_estimate > tol.near_singular_cond)
      throw NumericalError(
          NumericalError::Kind::NearSingular,
          "corrector system condition estimate " + std::to_string(out.cond_estimate) +
              " suggests rm sits near the bad set; perturb rm");
  }
  if (!res.converged)
    throw NumericalError(NumericalError::Kind::NoConvergence,
                         "corrector solve stalled at relative residual " +
                             std::to_string(res.rel_residual));
  // Contract check: ||L b~ + curl(U ^ b)|| < tol.iterative * ||b||.
  CVector check(ws.size());
  ws.apply_corrector_op(x, rm, check);
  for (std::size_t i = 0; i < check.size(); ++i) check[i] -= rhs[i];
  out.residual = vnorm(check) / bn;
  out.corrector = ws.to_field(x);
  return out;
}

// Electromotive tensor by direct linear solve, columns alpha e_i =
// mean(U ^ corrector(e_i)).
inline AlphaTensor alpha_direct(const AlphaWorkspace& ws, double rm,
                                bool with_condition = true,
                                const Tolerances& tol = default_tolerances()) {
  CMat3 cols;
  double worst_res = 0.0, cond = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec3d e{};
    e[i] = 1.0;
    const auto sol = solve_corrector(ws, rm, e, with_condition && i == 0, tol);
    worst_res = std::max(worst_res, sol.residual);
    if (i == 0) cond = sol.cond_estimate;
    const CVec3 col = ws.mean_cross_flow(sol.corrector.raw());
    for (int r = 0; r < 3; ++r) cols(r, i) = col[r];
  }
  const double imag_res = max_imag(cols);
  if (imag_res > tol.algebraic)
    throw NumericalError(NumericalError::Kind::NanDetected,
                         "alpha has imaginary residue " + std::to_string(imag_res));
  AlphaTensor t = make_alpha_tensor(real(cols), rm, "direct");
  t.diag.imag_residue = imag_res;
  t.diag.cond_estimate = cond;
  t.diag.corrector_residual = worst_res;
  return t;
}

// Electromotive tensor from the resolvent power series in rm; returns the
// partial sum through n_terms terms plus per-term norms.
inline AlphaTensor alpha_series(const AlphaWorkspace& ws, double rm, int n_terms,
                                const Tolerances& tol = default_tolerances()) {
  if (!(rm > 0.0)) throw ValidationError("rm must be positive");
  if (n_terms < 0) throw ValidationError("n_terms must be >= 0");
  Mat3 sum{};
  std::vector<double> term_norms;
  std::array<CVector, 3> chain{ws.constant_vector({1, 0, 0}),
                               ws.constant_vector({0, 1, 0}),
                               ws.constant_vector({0, 0, 1})};
  CVector next(ws.size());
  double scale = 1.0;
  int rising = 0;
  for (int n = 1; n <= n_terms; ++n) {
    scale *= rm;
    CMat3 term;
    for (int i = 0; i < 3; ++i) {
      ws.apply_series_op(chain[i], next);
      std::swap(chain[i], next);
      const CVec3 col = ws.mean_cross_flow(chain[i]);
      for (int r = 0; r < 3; ++r) term(r, i) = scale * col[r];
    }
    const double imag_res = max_imag(term);
    if (imag_res > tol.algebraic)
      throw NumericalError(NumericalError::Kind::NanDetected,
                           "series term has imaginary residue");
    const Mat3 term_re = real(term);
    sum += term_re;
    term_norms.push_back(frobenius_norm(term_re));
    const std::size_t m = term_norms.size();
    if (m >= 2 && term_norms[m - 1] >= term_norms[m - 2]) {
      if (++rising >= 3)
        throw NumericalError(NumericalError::Kind::Diverging,
                             "series term norms non-decreasing over 3 terms");
    } else {
      rising = 0;
    }
  }
  AlphaTensor t = make_alpha_tensor(sum, rm, "series(" + std::to_string(n_terms) + ")");
  t.diag.term_norms = std::move(term_norms);
  const auto& tn = t.diag.term_norms;
  t.diag.series_converged =
      !tn.empty() && tn.back() < tol.series_stop_rel * frobenius_norm(sum);
  return t;
}

// Leading symmetric coefficient of the series: the quadratic form
// sum_k Uhat(-k) ^ ((i k / |k|^2) ^ (Uhat(k) ^ b)).
inline Mat3 alpha2(const FourierVectorField& U,
                   const Tolerances& tol = default_tolerances()) {
  if (U.spec().periods != std::array<double, 3>{1.0, 1.0, 1.0})
    throw ValidationError("alpha2 is defined on the unit torus");
  CMat3 acc;
  detail::for_each_mode(U.spec(), [&](const WaveVector& k) {
    if (k[0] == 0 && k[1] == 0 && k[2] == 0) return;
    const CVec3 uk = U.at(k);
    if (uk.x == Complex(0.0) && uk.y == Complex(0.0) && uk.z == Complex(0.0)) return;
    const Vec3d kap{double(k[0]), double(k[1]), double(k[2])};
    const CVec3 ikk = (1.0 / dot(kap, kap)) *
                      CVec3{Complex(0, kap.x), Complex(0, kap.y), Complex(0, kap.z)};
    const CVec3 umk = U.at(-k);
    for (int i = 0; i < 3; ++i) {
      CVec3 b{};
      b[i] = 1.0;
      const CVec3 col = cross(umk, cross(ikk, cross(uk, b)));
      for (int r = 0; r < 3; ++r) acc(r, i) += col[r];
    }
  });
  if (max_imag(acc) > tol.algebraic)
    throw NumericalError(NumericalError::Kind::NanDetected,
                         "alpha2 has imaginary residue");
  return real(acc);
}

inline AlphaTensor alpha2_tensor(const FourierVectorField& U,
                                 const Tolerances& tol = default_tolerances()) {
  return make_alpha_tensor(alpha2(U, tol), 0.0, "alpha2");
}

}  // namespace alphadyn
