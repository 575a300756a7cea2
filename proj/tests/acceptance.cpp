// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each check prints one PASS/FAIL line with its
// wall time; the process exits 0 only if every check passes. Run with
// --only N to execute a single check.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "alphadyn/evolve.hpp"
#include "alphadyn/perturb.hpp"
#include "alphadyn/pipeline.hpp"
#include "oracles.hpp"

using namespace alphadyn;

namespace {

struct CheckResult {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

FourierVectorField vfields(int j, int K) {
  FourierVectorField u(TorusSpec::unit(K));
  for (int i = 1; i <= 3; ++i) u += build_v(j, i, K);
  return u;
}

// ---- 1. closed-form quadratic response of the shell fields ----------------
CheckResult check_shell_golden() {
  CheckResult r;
  double worst = 0;
  for (int j : {0, 1, 2, 5})
    for (int i = 1; i <= 3; ++i) {
      const Mat3 a2 = alpha2(build_v(j, i));
      Mat3 expect{};
      for (int c = 0; c < 3; ++c)
        if (c != i - 1) expect(c, c) = -1.0 / double(j + i);
      worst = std::max(worst, max_abs(a2 - expect));
    }
  r.note("max entry error " + fmt17(worst));
  if (worst >= 1e-12) r.fail("exceeds 1e-12");
  return r;
}

// ---- 2. diagonal shift identity under the explicit perturbation -----------
CheckResult check_shift_identity() {
  CheckResult r;
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int j = trial % 5;  // j <= 4
    const auto u = oracle::random_field(j + 3, 2, 9000 + trial);
    const auto plan = perturb(u, j, {1.0, 1.0, 1.0});
    Mat3 expect = plan.alpha2_base;
    for (int i = 1; i <= 3; ++i)
      for (int c = 0; c < 3; ++c)
        if (c != i - 1) expect(c, c) -= 1.0 / double(j + i);
    worst = std::max(worst, max_abs(plan.alpha2_perturbed - expect));
  }
  r.note("max identity error " + fmt17(worst));
  if (worst >= 1e-12) r.fail("exceeds 1e-12");
  return r;
}

// ---- 3. series route against the direct solve -----------------------------
CheckResult check_series_vs_direct() {
  CheckResult r;
  double worst_rel = 0, worst_ratio = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = oracle::random_field(6, 2, 500 + trial);
    AlphaWorkspace ws(u, 6);
    const auto sr = estimate_rm0(ws);
    const double rm = sr.rm0 / 4.0;
    const auto direct = alpha_direct(ws, rm, false);
    const auto series = alpha_series(ws, rm, 12);
    const double rel = frobenius_norm(series.alpha - direct.alpha) /
                       frobenius_norm(direct.alpha);
    worst_rel = std::max(worst_rel, rel);
    // Geometric decay of the term norms over the tail.
    const auto& t = series.diag.term_norms;
    for (std::size_t n = 4; n + 2 < t.size(); n += 2) {
      if (t[n] > 0 && t[n + 2] > 0)
        worst_ratio = std::max(worst_ratio, t[n + 2] / t[n]);
    }
  }
  r.note("max relative gap " + fmt17(worst_rel) + ", worst tail ratio " +
         fmt17(worst_ratio));
  if (worst_rel >= 1e-8) r.fail("relative error exceeds 1e-8");
  if (worst_ratio >= 1.0) r.fail("term norms do not decay geometrically");
  return r;
}

// ---- 4. 3x3 spectral law ---------------------------------------------------
CheckResult check_spectral_law() {
  CheckResult r;
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  std::uniform_int_distribution<int> rat(1, 8);
  double worst_rate = 0, worst_orth = 0, worst_lambda = 0;
  int done = 0;
  while (done < 200) {
    const Vec3d eigs{dist(rng) + 3.0, dist(rng), dist(rng) - 3.0};
    const Vec3d gamma{dist(rng), dist(rng), dist(rng)};
    Mat3 d{}, g{};
    d(0, 0) = eigs.x;
    d(1, 1) = eigs.y;
    d(2, 2) = eigs.z;
    g(0, 1) = -gamma.z;
    g(0, 2) = gamma.y;
    g(1, 0) = gamma.z;
    g(1, 2) = -gamma.x;
    g(2, 0) = -gamma.y;
    g(2, 1) = gamma.x;
    const AlphaTensor t = make_alpha_tensor(d + g, 0.25, "direct");
    const RationalVec3 xi{Rational(rat(rng), rat(rng)), Rational(rat(rng), rat(rng)),
                          Rational(rat(rng), rat(rng))};
    LargeScaleMode mode;
    try {
      mode = predict_mode(t, xi);
    } catch (const NumericalError&) {
      continue;  // direction outside the growth region
    }
    ++done;
    const auto dense = oracle::eig3(a_xi(mode.xi_value) * to_complex(t.alpha));
    double best = 1e300;
    for (const auto& e : dense) best = std::min(best, std::abs(e - mode.rate));
    worst_rate = std::max(worst_rate, best);
    worst_orth = std::max(worst_orth,
                          std::abs(cdot(to_complex(mode.zeta), mode.beta)));
    const double s = spectral_discriminant(mode.zeta, mode.alphas);
    worst_lambda =
        std::max(worst_lambda, std::abs(mode.lambda_plus - std::sqrt(s)));
  }
  r.note("rate err " + fmt17(worst_rate) + ", zeta.beta " + fmt17(worst_orth) +
         ", lambda err " + fmt17(worst_lambda));
  if (worst_rate >= 1e-10) r.fail("rate mismatch above 1e-10");
  if (worst_orth >= 1e-12) r.fail("zeta.beta above 1e-12");
  if (worst_lambda >= 1e-12) r.fail("lambda_plus formula above 1e-12");
  return r;
}

// ---- 5. neutral-space dimension of the unmodulated operator ---------------
CheckResult check_kernel_dimension() {
  CheckResult r;
  const auto u = vfields(0, 6);
  AlphaWorkspace ws(u, 6);
  const auto sr = estimate_rm0(ws);
  const auto rep = kernel_report(u, sr.rm0 / 4.0, 6);
  double worst_res = 0;
  for (double x : rep.kernel_residuals) worst_res = std::max(worst_res, x);
  r.note("kernel residuals " + fmt17(worst_res) + ", eigen match " +
         fmt17(rep.corrector_match) + ", next |mu| " + fmt17(rep.mu4_abs));
  if (worst_res >= 1e-8) r.fail("neutral directions not annihilated to 1e-8");
  if (rep.corrector_match >= 1e-6) r.fail("eigenvector match above 1e-6");
  if (rep.mu4_abs <= 1e-6) r.fail("a fourth eigenvalue sits within 1e-6 of zero");
  return r;
}

// ---- 6. homogenized limit of the modulated branch -------------------------
CheckResult check_homogenization() {
  CheckResult r;
  const auto u = vfields(0, 8);
  AlphaWorkspace ws(u, 8);
  const auto sr = estimate_rm0(ws);
  const double rm = sr.rm0 / 4.0;
  const RationalVec3 xi{Rational(1, 8), Rational(1, 8), Rational(1, 8)};
  std::vector<double> eps;
  for (int p = 4; p <= 9; ++p) eps.push_back(std::pow(2.0, -p));
  const auto sw = convergence_sweep(u, rm, xi, 8, eps);
  if (sw.outcome != SweepOutcome::Converging) {
    r.fail("sweep did not continue the branch");
    return r;
  }
  r.note("slope " + fmt17(sw.fit_slope) + ", rate " + fmt17(sw.rate_ref.real()));
  if (sw.fit_slope < 0.8) r.fail("log-log slope below 0.8");
  if (!sw.all_growing) r.fail("Re mu lost positivity inside the sweep");
  return r;
}

// Shared context of the two big-torus checks.
struct BigTorusContext {
  double rm = 2.0, re = 0.5;
  int K = 5;
  std::array<std::int64_t, 3> T{4, 4, 4};
  RationalVec3 xi{Rational(1, 1), Rational(1, 1), Rational(1, 1)};
  Rational eps{1, 4};
  Complex mu;
  std::unique_ptr<MhdSystem> sys;
  std::unique_ptr<SeededMode> seeded;
  RhoEstimate rho;
};

BigTorusContext& big_torus_context() {
  static BigTorusContext ctx = [] {
    BigTorusContext c;
    const auto u = vfields(0, c.K);
    c.rho = estimate_rho(u, c.T, c.K, c.rm);
    // Seed the dominant sector of the box.
    RationalVec3 xi;
    for (int a = 0; a < 3; ++a)
      xi[a] = Rational(std::llround(c.rho.sector[a] * c.T[a]), 1);
    for (auto& q : xi)
      if (q.num == 0) q = Rational(0, 1);
    c.xi = xi;
    BlochOperator op(u, c.rm, value(xi), c.eps.value(), c.K);
    const auto er = eigensolve_near(op, c.rho.mu);
    c.mu = er.eigenvalue;
    c.sys = std::make_unique<MhdSystem>(u, c.T, c.K, c.re, c.rm);
    c.seeded = std::make_unique<SeededMode>(seed_mode_on_big_torus(
        *c.sys, op.to_field(er.eigenvector), xi, c.eps, er.eigenvalue));
    return c;
  }();
  return ctx;
}

// ---- 7. linearized integration reproduces the eigen growth ----------------
CheckResult check_linear_growth() {
  CheckResult r;
  auto& ctx = big_torus_context();
  const double t_end = 5.0 / ctx.mu.real();
  const double slope = linear_growth_slope(*ctx.sys, *ctx.seeded, t_end);
  const double rel = std::abs(slope - ctx.mu.real()) / ctx.mu.real();
  r.note("slope " + fmt17(slope) + " vs Re mu " + fmt17(ctx.mu.real()) +
         " (rel " + fmt17(rel) + ")");
  if (rel > 0.01) r.fail("linear run misses the eigen growth by more than 1%");
  return r;
}

// ---- 8. escape-time scaling law --------------------------------------------
CheckResult check_timescale_law() {
  CheckResult r;
  auto& ctx = big_torus_context();
  const double c0 = 0.1 * norm_l2(ctx.sys->steady_flow());
  const double horizon = 400.0;
  const std::vector<double> deltas{1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> x, y;
  std::vector<std::optional<double>> tds(deltas.size());

  // Independent runs; two worker threads (each owns its system instance).
  std::vector<std::thread> workers;
  const auto u = vfields(0, ctx.K);
  std::vector<std::unique_ptr<MhdSystem>> systems;
  for (int w = 0; w < 2; ++w)
    systems.push_back(std::make_unique<MhdSystem>(u, ctx.T, ctx.K, ctx.re, ctx.rm));
  for (int w = 0; w < 2; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < deltas.size(); i += 2) {
        const auto run =
            run_instability(*systems[w], *ctx.seeded, deltas[i], c0, horizon);
        tds[i] = run.t_delta;
      }
    });
  }
  for (auto& t : workers) t.join();

  bool monotone = true;
  double prev = -1e300;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!tds[i]) {
      r.fail("no escape for delta " + fmt17(deltas[i]));
      continue;
    }
    x.push_back(-std::log(deltas[i]));
    y.push_back(*tds[i]);
    if (*tds[i] < prev - 1e-9) monotone = false;
    prev = *tds[i];
  }
  if (!monotone) r.fail("t_delta not monotone in delta");
  if (x.size() == deltas.size()) {
    const LineFit fit = fit_line(x, y);
    const double rho = ctx.rho.rho;
    const double rel = std::abs(fit.slope - 1.0 / rho) * rho;
    r.note("slope " + fmt17(fit.slope) + " vs 1/rho " + fmt17(1.0 / rho) +
           " (rel " + fmt17(rel) + "), r2 " + fmt17(fit.r2));
    if (fit.r2 < 0.99) r.fail("fit r2 below 0.99");
    if (rel > 0.10) r.fail("slope misses 1/rho by more than 10%");
  }
  return r;
}

// ---- 9. randomized invariants ----------------------------------------------
CheckResult check_invariants() {
  CheckResult r;
  double worst_reality = 0, worst_divcurl = 0, worst_parseval = 0,
         worst_convolution = 0, worst_energy = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = oracle::random_field(4, 3, 40000 + trial, trial % 2 == 0);
    worst_reality = std::max(worst_reality, conj_symmetry_error(curl(f)));
    worst_reality = std::max(worst_reality, conj_symmetry_error(leray_project(f)));
    const auto dc = divergence(curl(f));
    for (const auto& v : dc.raw())
      worst_divcurl = std::max(worst_divcurl, std::abs(v));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = oracle::random_field(3, 2, 41000 + trial, false);
    worst_parseval = std::max(
        worst_parseval, std::abs(norm_l2(f) - oracle::quadrature_l2(f, 10)));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = oracle::random_field(4, 2, 42000 + trial);
    const auto b = oracle::random_field(4, 2, 43000 + trial);
    const auto fast = cross_convolve(u, b);
    const auto ref = oracle::collocation_cross(u, b, 13);
    double w = 0;
    detail::for_each_mode(fast.spec(), [&](const WaveVector& k) {
      w = std::max(w, norm2(fast.at(k) - ref.at(k)));
    });
    worst_convolution = std::max(worst_convolution, w);
    worst_reality = std::max(worst_reality, conj_symmetry_error(fast));
  }
  {
    // Diffusion-only decay over 100 random modes on the big torus.
    FourierVectorField zero(TorusSpec::unit(1));
    MhdSystem sys(zero, {2, 2, 2}, 2, 0.9, 0.7);
    std::mt19937_64 rng(44000);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (int trial = 0; trial < 100; ++trial) {
      MhdState s = sys.zero_state();
      WaveVector k{};
      while (k == WaveVector{0, 0, 0})
        k = {int(std::floor(dist(rng) * 4)), int(std::floor(dist(rng) * 4)),
             int(std::floor(dist(rng) * 4))};
      CVec3 v{Complex(dist(rng), dist(rng)), Complex(dist(rng), dist(rng)),
              Complex(dist(rng), dist(rng))};
      if (!sys.spec().contains(k)) continue;
      s.b.set(k, v);
      s.b.set(-k, conj(v));
      s.b = leray_project(s.b);
      const double n0 = norm_l2(s.b);
      if (n0 == 0) continue;
      for (int i = 0; i < 5; ++i) sys.step(s, 0.02, false);
      const Vec3d kap = sys.spec().angular(k);
      const double want = n0 * std::exp(-dot(kap, kap) * s.t / sys.rm());
      worst_energy =
          std::max(worst_energy, std::abs(norm_l2(s.b) - want) / want);
    }
  }
  r.note("reality " + fmt17(worst_reality) + ", div(curl) " +
         fmt17(worst_divcurl) + ", parseval " + fmt17(worst_parseval) +
         ", convolution " + fmt17(worst_convolution) + ", decay " +
         fmt17(worst_energy));
  if (worst_reality >= 1e-12) r.fail("reality closure above 1e-12");
  if (worst_divcurl >= 1e-12) r.fail("div(curl) above 1e-12");
  if (worst_parseval >= 1e-10) r.fail("Parseval gap above 1e-10");
  if (worst_convolution >= 1e-10) r.fail("convolution vs collocation above 1e-10");
  if (worst_energy >= 1e-8) r.fail("diffusion decay off by more than 1e-8");
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only = std::atoi(argv[i + 1]);

  struct Entry {
    int id;
    const char* name;
    double budget_s;
    std::function<CheckResult()> fn;
  };
  const std::vector<Entry> entries = {
      {1, "shell-field quadratic response golden values", 1, check_shell_golden},
      {2, "perturbation diagonal shift identity", 10, check_shift_identity},
      {3, "series route equals direct solve", 120, check_series_vs_direct},
      {4, "3x3 spectral law against dense eigensolves", 5, check_spectral_law},
      {5, "neutral space of the unmodulated operator", 60, check_kernel_dimension},
      {6, "homogenized limit of the modulated branch", 600, check_homogenization},
      {7, "linearized integration vs eigen growth", 300, check_linear_growth},
      {8, "escape-time scaling law", 1800, check_timescale_law},
      {9, "randomized invariant suite", 120, check_invariants},
  };

  bool all_pass = true;
  for (const auto& e : entries) {
    if (only && e.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    CheckResult res;
    try {
      res = e.fn();
    } catch (const std::exception& ex) {
      res.fail(std::string("exception: ") + ex.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (secs > e.budget_s)
      res.fail("runtime " + fmt17(secs) + "s exceeds budget " +
               fmt17(e.budget_s) + "s");
    std::printf("[%d] %-48s %s (%.2f s)%s%s\n", e.id, e.name,
                res.pass ? "PASS" : "FAIL", secs, res.detail.empty() ? "" : " — ",
                res.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && res.pass;
  }
  std::printf("acceptance: %s\n", all_pass ? "ALL PASS" : "FAILURES");
  return all_pass ? 0 : 4;
}
