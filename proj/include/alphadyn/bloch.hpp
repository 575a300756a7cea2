// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "alphadyn/alpha.hpp"
#include "alphadyn/convolve.hpp"
#include "alphadyn/eigen3x3.hpp"
#include "alphadyn/errors.hpp"
#include "alphadyn/field.hpp"
#include "alphadyn/gmres.hpp"

namespace alphadyn {

// Induction operator curl(U ^ .) + laplacian/rm conjugated by the modulation
// phase exp(i q . theta), q = eps * xi: every mode sees the shifted
// wavevector kappa + q. Matrix-free on the truncation cube.
class BlochOperator {
public:
  BlochOperator(const FourierVectorField& U, double rm, const Vec3d& xi,
                double eps, int K)
      : spec_(U.spec().periods, K),
        rm_(rm),
        xi_(xi),
        eps_(eps),
        flow_(embed(U, K)),
        conv_(flow_, spec_) {
    if (!(rm > 0)) throw ValidationError("rm must be positive");
    const auto m = spec_.modes();
    shifted_.resize(m);
    for (std::int64_t i = 0; i < m; ++i) {
      const auto k = spec_.wavevector_at(i);
      const Vec3d kap = spec_.angular(k);
      shifted_[i] = {kap.x + eps * xi.x, kap.y + eps * xi.y, kap.z + eps * xi.z};
    }
  }

  const TorusSpec& spec() const { return spec_; }
  double rm() const { return rm_; }
  double eps() const { return eps_; }
  const Vec3d& xi() const { return xi_; }
  std::int64_t size() const { return 3 * spec_.modes(); }

  void apply(const CVector& v, CVector& out) const {
    conv_.cross_with_flow(v.data(), scratch_.data());
    const auto m = spec_.modes();
    for (std::int64_t i = 0; i < m; ++i) {
      const Vec3d q = shifted_[i];
      const CVec3 g{scratch_[i], scratch_[i + m], scratch_[i + 2 * m]};
      const CVec3 iq{Complex(0, q.x), Complex(0, q.y), Complex(0, q.z)};
      const CVec3 c = cross(iq, g);
      const double diff = dot(q, q) / rm_;
      out[i] = c.x - diff * v[i];
      out[i + m] = c.y - diff * v[i + m];
      out[i + 2 * m] = c.z - diff * v[i + 2 * m];
    }
  }

  // Diagonal part -|kappa + q|^2 / rm, used as the shift-invert preconditioner.
  double diagonal(std::int64_t i) const {
    return -dot(shifted_[i], shifted_[i]) / rm_;
  }

  // Remove the modulated-gradient component: the physical eigenvectors are
  // divergence-free in the shifted sense (kappa + q) . v = 0.
  void project_divfree(CVector& v) const {
    const auto m = spec_.modes();
    for (std::int64_t i = 0; i < m; ++i) {
      const Vec3d q = shifted_[i];
      const double q2 = dot(q, q);
      if (q2 == 0.0) continue;
      const Complex qv =
          (q.x * v[i] + q.y * v[i + m] + q.z * v[i + 2 * m]) / q2;
      v[i] -= qv * q.x;
      v[i + m] -= qv * q.y;
      v[i + 2 * m] -= qv * q.z;
    }
  }

  // Worst divergence of a coefficient vector in the modulated sense
  // (kappa + q) . v, normalized by ||v||.
  double divergence_error(const CVector& v) const {
    const auto m = spec_.modes();
    double worst = 0.0;
    for (std::int64_t i = 0; i < m; ++i) {
      const Vec3d q = shifted_[i];
      const Complex d = q.x * v[i] + q.y * v[i + m] + q.z * v[i + 2 * m];
      worst = std::max(worst, std::abs(d));
    }
    return worst / std::max(vnorm(v), 1e-300);
  }

  FourierVectorField to_field(const CVector& v) const {
    FourierVectorField f(spec_);
    f.raw() = v;
    return f;
  }

private:
  TorusSpec spec_;
  double rm_;
  Vec3d xi_;
  double eps_;
  FourierVectorField flow_;
  mutable FlowConvolver conv_;
  std::vector<Vec3d> shifted_;
  mutable CVector scratch_{CVector(size_t(3) * spec_.modes(), Complex(0.0))};
};

struct EigenResult {
  Complex eigenvalue{};
  CVector eigenvector;
  double residual = 0.0;
  int iterations = 0;
  int inner_iterations = 0;
};

namespace detail {

inline GmresResult shifted_solve(const BlochOperator& op, Complex sigma,
                                 const CVector& b, CVector& x,
                                 const Tolerances& tol) {
  auto apply = [&](const CVector& in, CVector& out) {
    op.apply(in, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= sigma * in[i];
  };
  const auto m = op.spec().modes();
  auto precond = [&](const CVector& in, CVector& out) {
    for (std::int64_t i = 0; i < m; ++i) {
      Complex d = op.diagonal(i) - sigma;
      if (std::abs(d) < 1e-10) d = Complex(1e-10, 1e-10);
      out[i] = in[i] / d;
      out[i + m] = in[i + m] / d;
      out[i + 2 * m] = in[i + 2 * m] / d;
    }
  };
  return gmres(apply, precond, b, x, tol.gmres_rel, tol.gmres_restart,
               tol.gmres_maxiter);
}

}  // namespace detail

// Shift-invert power iteration around a fixed target. The start vector, when
// not supplied, is a deterministic seeded probe.
inline EigenResult eigensolve_near(const BlochOperator& op, Complex target,
                                   const CVector* start = nullptr,
                                   const Tolerances& tol = default_tolerances()) {
  const std::int64_t n = op.size();
  CVector v;
  if (start && std::int64_t(start->size()) == n && vnorm(*start) > 0) {
    v = *start;
  } else {
    std::mt19937_64 rng(0xb10c4ULL);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    v.resize(n);
    for (auto& z : v) z = Complex(dist(rng), dist(rng));
  }
  vscale(v, 1.0 / vnorm(v));

  EigenResult out;
  CVector w(n), av(n);
  Complex sigma = target;
  for (int jit = 0; jit < 6; ++jit) {
    bool singular = false;
    for (int it = 0; it < tol.eigen_maxiter; ++it) {
      w.assign(n, Complex(0.0));
      const auto r = detail::shifted_solve(op, sigma, v, w, tol);
      out.inner_iterations += r.iterations;
      if (!r.converged) {
        singular = true;
        break;
      }
      op.project_divfree(w);
      vscale(w, 1.0 / vnorm(w));
      std::swap(v, w);
      ++out.iterations;
      op.apply(v, av);
      const Complex mu = vdot(v, av);  // Rayleigh quotient, ||v|| = 1
      double res = 0.0;
      for (std::int64_t i = 0; i < n; ++i) res += std::norm(av[i] - mu * v[i]);
      res = std::sqrt(res);
      out.residual = res;
      out.eigenvalue = mu;
      if (res <= tol.eigen_residual) {
        out.eigenvector = v;
        return out;
      }
    }
    if (!singular) break;
    // Deterministic jitter ladder for shifts that hit the spectrum.
    const double bump = std::max(std::abs(sigma), 1e-6);
    sigma = target + Complex(1e-4 * (jit + 1) * bump, 1e-4 * (jit + 1) * bump);
  }
  throw NumericalError(NumericalError::Kind::NoConvergence,
                       "shift-invert iteration missed the residual target (last "
                       "residual " + std::to_string(out.residual) + ")");
}

// Neutral modes of the eps = 0 operator: constants completed by their
// corrector. Checks the three exact kernel vectors and estimates the
// smallest nonzero eigenvalue magnitude of the fluctuation block.
struct KernelReport {
  std::array<double, 3> kernel_residuals{};
  double corrector_match = 0.0;  // worst subspace mismatch of eigensolve vs corrector
  double mu4_abs = 0.0;          // |eigenvalue| nearest zero beyond the kernel
};

inline KernelReport kernel_report(const FourierVectorField& U, double rm, int K,
                                  const Tolerances& tol = default_tolerances()) {
  AlphaWorkspace ws(U, K);
  BlochOperator op(U, rm, {0, 0, 0}, 0.0, K);
  KernelReport rep;
  CVector av(op.size());
  std::array<CVector, 3> kernel;
  for (int i = 0; i < 3; ++i) {
    Vec3d e{};
    e[i] = 1.0;
    const auto sol = solve_corrector(ws, rm, e, false, tol);
    kernel[i] = ws.constant_vector(e);
    const auto& bt = sol.corrector.raw();
    for (std::size_t idx = 0; idx < kernel[i].size(); ++idx)
      kernel[i][idx] += bt[idx];
    op.apply(kernel[i], av);
    rep.kernel_residuals[i] = vnorm(av) / vnorm(kernel[i]);
  }
  // Inverse power iteration on the zero-mean block for the nearest nonzero
  // eigenvalue: solve the corrector operator, which is that block.
  CVector v = ws.seeded_vector(0x4eedULL);
  vscale(v, 1.0 / vnorm(v));
  CVector x(v.size(), Complex(0.0));
  double inv = 0.0;
  for (int it = 0; it < 10; ++it) {
    x.assign(x.size(), Complex(0.0));
    auto apply = [&](const CVector& in, CVector& out) {
      ws.apply_corrector_op(in, rm, out);
    };
    auto precond = [&](const CVector& in, CVector& out) {
      ws.apply_preconditioner(in, rm, out);
    };
    const auto r = gmres(apply, precond, v, x, tol.gmres_rel, tol.gmres_restart,
                         tol.gmres_maxiter);
    if (!r.converged)
      throw NumericalError(NumericalError::Kind::NoConvergence,
                           "kernel gap estimate solve failed");
    inv = vnorm(x);
    vscale(x, 1.0 / inv);
    std::swap(v, x);
  }
  rep.mu4_abs = 1.0 / inv;

  // Subspace match: eigen-refine each kernel vector by one inverse iteration
  // with a tiny shift and measure its distance to the corrector-built span
  // (orthonormalized first).
  std::array<CVector, 3> ortho = kernel;
  for (int l = 0; l < 3; ++l) {
    for (int p = 0; p < l; ++p) {
      const Complex c = vdot(ortho[p], ortho[l]);
      vaxpy(ortho[l], -c, ortho[p]);
    }
    vscale(ortho[l], 1.0 / vnorm(ortho[l]));
  }
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    CVector y = kernel[i];
    vscale(y, 1.0 / vnorm(y));
    CVector z(y.size(), Complex(0.0));
    const auto r = detail::shifted_solve(op, Complex(1e-9, 1e-9), y, z, tol);
    if (r.converged) {
      vscale(z, 1.0 / vnorm(z));
      CVector resid = z;
      for (int l = 0; l < 3; ++l) vaxpy(resid, -vdot(ortho[l], z), ortho[l]);
      worst = std::max(worst, vnorm(resid));
    }
  }
  rep.corrector_match = worst;
  return rep;
}

struct SweepRow {
  double eps = 0.0;
  Complex mu{};
  Complex mu_over_eps{};
  double residual = 0.0;
};

enum class SweepOutcome { Converging, NoUnstableBranch, BranchLoss };

struct SweepResult {
  SweepOutcome outcome = SweepOutcome::Converging;
  std::vector<SweepRow> rows;
  Complex rate_ref{};      // homogenized prediction lambda_plus - i zeta.gamma
  double fit_slope = 0.0;  // log|mu/eps - rate| vs log eps
  double fit_r2 = 0.0;
  bool all_growing = false;
  double failed_eps = 0.0; // set on BranchLoss
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double fit = f.slope * x[i] + f.intercept;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// Eigenvalue branch continued from large eps to small, with the homogenized
// rate as the eps -> 0 reference. eps_list must be decreasing.
inline SweepResult convergence_sweep(const FourierVectorField& U, double rm,
                                     const RationalVec3& xi, int K,
                                     const std::vector<double>& eps_list,
                                     const Tolerances& tol = default_tolerances()) {
  if (eps_list.empty()) throw ValidationError("empty eps list");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]) || !(eps_list[i] > 0))
      throw ValidationError("eps list must be positive and decreasing");

  SweepResult out;
  AlphaWorkspace ws(U, K);
  LargeScaleMode mode;
  try {
    const AlphaTensor alpha = alpha_direct(ws, rm, false, tol);
    mode = predict_mode(alpha, xi, tol);
  } catch (const NumericalError& e) {
    if (e.kind() == NumericalError::Kind::DegenerateAlpha ||
        e.kind() == NumericalError::Kind::OutsideCone) {
      out.outcome = SweepOutcome::NoUnstableBranch;
      return out;
    }
    throw;
  }
  out.rate_ref = mode.rate;

  // Start vector: the kernel completion of the predicted eigendirection.
  CVector carried;
  {
    CVec3 pb = mode.mode_vector;
    CVector re = ws.constant_vector(real(pb));
    CVector im = ws.constant_vector(imag(pb));
    const auto sol_r = solve_corrector(ws, rm, real(pb), false, tol);
    const auto sol_i = solve_corrector(ws, rm, imag(pb), false, tol);
    carried.assign(re.size(), Complex(0.0));
    for (std::size_t i = 0; i < carried.size(); ++i)
      carried[i] = re[i] + sol_r.corrector.raw()[i] +
                   Complex(0, 1) * (im[i] + sol_i.corrector.raw()[i]);
  }

  Complex prev_mu{};
  double prev_eps = 0.0;
  for (const double eps : eps_list) {
    BlochOperator op(U, rm, value(xi), eps, K);
    const Complex target = (out.rows.empty())
                               ? eps * mode.rate
                               : prev_mu * (eps / prev_eps);
    EigenResult er;
    try {
      er = eigensolve_near(op, target, &carried, tol);
    } catch (const NumericalError&) {
      out.outcome = SweepOutcome::BranchLoss;
      out.failed_eps = eps;
      return out;
    }
    // Continuation sanity: the branch should move smoothly.
    if (!out.rows.empty()) {
      const double jump = std::abs(er.eigenvalue - target);
      if (jump > 1e-4 + 0.75 * std::abs(target)) {
        out.outcome = SweepOutcome::BranchLoss;
        out.failed_eps = eps;
        return out;
      }
    }
    SweepRow row;
    row.eps = eps;
    row.mu = er.eigenvalue;
    row.mu_over_eps = er.eigenvalue / eps;
    row.residual = er.residual;
    out.rows.push_back(row);
    carried = er.eigenvector;
    prev_mu = er.eigenvalue;
    prev_eps = eps;
  }

  out.all_growing = true;
  std::vector<double> lx, ly;
  for (const auto& r : out.rows) {
    if (r.mu.real() <= 0) out.all_growing = false;
    const double err = std::abs(r.mu_over_eps - out.rate_ref);
    if (err > 0) {
      lx.push_back(std::log(r.eps));
      ly.push_back(std::log(err));
    }
  }
  const LineFit f = fit_line(lx, ly);
  out.fit_slope = f.slope;
  out.fit_r2 = f.r2;
  if (!out.all_growing && out.rate_ref.real() <= 0)
    out.outcome = SweepOutcome::NoUnstableBranch;
  return out;
}

}  // namespace alphadyn
