// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "alphadyn/evolve.hpp"
#include "alphadyn/jsonio.hpp"
#include "alphadyn/perturb.hpp"

namespace alphadyn {

struct PresetInfo {
  std::string name;
  std::string description;
  std::vector<std::string> symmetry_tags;
};

inline std::vector<PresetInfo> presets() {
  return {
      {"zero", "identically zero flow", {"trivial", "alpha = 0"}},
      {"abc",
       "A=B=C=1 Beltrami cellular flow",
       {"beltrami: curl U = U", "cyclic coordinate symmetry",
        "isotropic leading electromotive response"}},
      {"vfields:J",
       "sum of the three single-shell fields at shells J+1, J+2, J+3",
       {"divergence-free axis modes", "diagonal leading electromotive response",
        "distinct response eigenvalues"}},
  };
}

inline FourierVectorField make_preset(const std::string& name) {
  if (name == "zero") return FourierVectorField(TorusSpec::unit(1));
  if (name == "abc" || name == "abc-like") {
    FourierVectorField u(TorusSpec::unit(1));
    const Complex half(0.5, 0.0), mihalf(0.0, -0.5);
    // (sin t3 + cos t2, sin t1 + cos t3, sin t2 + cos t1)
    CVec3 e3{}, e2{}, e1{};
    e3.x = mihalf;  // sin t3 in component 1
    e3.y = half;    // cos t3 in component 2
    e2.z = mihalf;  // sin t2 in component 3
    e2.x = half;    // cos t2 in component 1
    e1.y = mihalf;  // sin t1 in component 2
    e1.z = half;    // cos t1 in component 3
    u.set({0, 0, 1}, e3);
    u.set({0, 0, -1}, conj(e3));
    u.set({0, 1, 0}, e2);
    u.set({0, -1, 0}, conj(e2));
    u.set({1, 0, 0}, e1);
    u.set({-1, 0, 0}, conj(e1));
    return u;
  }
  if (name.rfind("vfields:", 0) == 0) {
    const int j = std::stoi(name.substr(8));
    FourierVectorField u(TorusSpec::unit(std::max(j + 3, 1)));
    for (int i = 1; i <= 3; ++i) u += build_v(j, i, std::max(j + 3, 1));
    return u;
  }
  throw ValidationError("unknown preset '" + name + "'");
}

struct PipelineConfig {
  std::string flow = "preset:abc";  // preset:NAME or file:PATH
  int j = 1;
  double gap = 0.05;      // 0 disables the explicit perturbation
  std::string rm = "auto";  // auto = quarter of the series threshold
  double re = 0.5;
  int trunc = 5;
  int qmax = 4;
  std::vector<double> eps_list = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128,
                                  1.0 / 256, 1.0 / 512};
  std::vector<double> delta_list = {1e-3, 1e-4, 1e-5, 1e-6};
  std::string c0 = "auto";  // auto = 0.1 ||U_s||_L2
  double horizon = 400.0;
  int box_scale = 4;       // target big-torus period multiple
  int box_max = 12;
  std::string dt = "auto";
  bool run_evolution = true;
  std::uint64_t seed = 0;  // reserved; nothing is random
  Tolerances tol = default_tolerances();
};

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace detail

// Flat key = value records; '#' starts a comment; unknown keys are rejected.
inline PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) +
                            " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "flow") cfg.flow = val;
      else if (key == "j") cfg.j = std::stoi(val);
      else if (key == "gap") cfg.gap = std::stod(val);
      else if (key == "rm") cfg.rm = val;
      else if (key == "re") cfg.re = std::stod(val);
      else if (key == "trunc") cfg.trunc = std::stoi(val);
      else if (key == "qmax") cfg.qmax = std::stoi(val);
      else if (key == "eps_list") cfg.eps_list = detail::parse_double_list(val);
      else if (key == "delta_list") cfg.delta_list = detail::parse_double_list(val);
      else if (key == "c0") cfg.c0 = val;
      else if (key == "horizon") cfg.horizon = std::stod(val);
      else if (key == "box_scale") cfg.box_scale = std::stoi(val);
      else if (key == "box_max") cfg.box_max = std::stoi(val);
      else if (key == "dt") cfg.dt = val;
      else if (key == "run_evolution") cfg.run_evolution = (val == "true" || val == "1");
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "tol_algebraic") cfg.tol.algebraic = std::stod(val);
      else if (key == "tol_iterative") cfg.tol.iterative = std::stod(val);
      else throw ValidationError("unknown config key '" + key + "'");
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      throw ValidationError("bad value for config key '" + key + "'");
    }
  }
  return cfg;
}

inline FourierVectorField load_flow_source(const std::string& source) {
  if (source.rfind("preset:", 0) == 0) return make_preset(source.substr(7));
  if (source.rfind("file:", 0) == 0) return load_field(source.substr(5));
  // Bare paths are treated as files.
  return load_field(source);
}

inline std::string alpha_to_json(const AlphaTensor& t) {
  JsonWriter diag;
  diag.num("imag_residue", t.diag.imag_residue)
      .num("cond_estimate", t.diag.cond_estimate)
      .num("rm0", t.diag.rm0)
      .num("corrector_residual", t.diag.corrector_residual)
      .boolean("series_converged", t.diag.series_converged)
      .field("term_norms", JsonWriter::num_array(t.diag.term_norms));
  JsonWriter w;
  w.field("alpha", JsonWriter::mat3(t.alpha))
      .field("sym", JsonWriter::mat3(t.sym))
      .field("antisym", JsonWriter::mat3(t.antisym))
      .field("gamma", JsonWriter::vec3(t.gamma))
      .num("rm", t.rm)
      .str("method", t.method)
      .field("diagnostics", diag.close());
  return w.close() + "\n";
}

inline AlphaTensor alpha_from_json(const nlohmann::json& j) {
  Mat3 a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = j.at("alpha").at(r).at(c).get<double>();
  AlphaTensor t = make_alpha_tensor(a, j.value("rm", 0.0), j.value("method", "file"));
  return t;
}

inline std::string mode_to_json(const LargeScaleMode& mode) {
  JsonWriter w;
  w.field("xi", JsonWriter::rationals(mode.xi))
      .field("xi_value", JsonWriter::vec3(mode.xi_value))
      .field("p", JsonWriter::mat3(mode.p))
      .field("alphas", JsonWriter::vec3(mode.alphas))
      .field("zeta", JsonWriter::vec3(mode.zeta))
      .field("gamma_rot", JsonWriter::vec3(mode.gamma_rot))
      .num("lambda_plus", mode.lambda_plus)
      .field("beta", JsonWriter::cvec3(mode.beta))
      .field("mode_vector", JsonWriter::cvec3(mode.mode_vector))
      .field("rate", JsonWriter::cplx(mode.rate))
      .num("residual", mode.residual)
      .str("selection", mode.selection);
  return w.close() + "\n";
}

inline std::string sweep_to_csv(const SweepResult& sw) {
  std::ostringstream out;
  out << "eps,re_mu,im_mu,re_mu_over_eps,im_mu_over_eps,residual\n";
  for (const auto& r : sw.rows)
    out << fmt17(r.eps) << "," << fmt17(r.mu.real()) << "," << fmt17(r.mu.imag())
        << "," << fmt17(r.mu_over_eps.real()) << "," << fmt17(r.mu_over_eps.imag())
        << "," << fmt17(r.residual) << "\n";
  return out.str();
}

inline std::string run_to_csv(const InstabilityRun& run) {
  std::ostringstream out;
  out << "t,l2_norm,hs_norm,linear_ref_norm,diff_norm\n";
  for (const auto& s : run.series)
    out << fmt17(s.t) << "," << fmt17(s.l2) << "," << fmt17(s.hs) << ","
        << fmt17(s.linear_ref) << "," << fmt17(s.diff) << "\n";
  return out.str();
}

struct PipelineReport {
  std::map<std::string, bool> checks;
  std::string summary_json;
  bool all_passed = true;
  std::string halted_stage;  // empty when the chain completed
};

// The full constructive chain: perturb -> alpha (two routes cross-checked)
// -> large-scale prediction -> modulated eigenvalue sweep -> big-torus
// escape-time sweep, with every stage persisted under outdir.
inline PipelineReport run_pipeline(const PipelineConfig& cfg,
                                   const std::string& outdir) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  const auto path = [&](const std::string& name) {
    return (fs::path(outdir) / name).string();
  };
  PipelineReport rep;
  auto check = [&](const std::string& name, bool ok) {
    rep.checks[name] = ok;
    rep.all_passed = rep.all_passed && ok;
  };

  // Stage 1: flow + perturbation.
  FourierVectorField u0 = load_flow_source(cfg.flow);
  write_text_file(path("flow.json"), field_to_json(u0) + "\n");
  PerturbationPlan plan;
  FourierVectorField flow(TorusSpec::unit(1));
  try {
    if (cfg.gap > 0) {
      plan = choose_deltas(u0, cfg.j, cfg.gap, cfg.tol);
      flow = plan.perturbed;
    } else {
      plan = perturb(u0, cfg.j, {0, 0, 0}, cfg.tol);
      flow = plan.base;
    }
  } catch (const NumericalError& e) {
    rep.halted_stage = "perturb: " + std::string(to_string(e.kind()));
    throw;
  }
  {
    JsonWriter w;
    w.integer("j", plan.j)
        .field("deltas", JsonWriter::num_array(
                   {plan.deltas[0], plan.deltas[1], plan.deltas[2]}))
        .field("alpha2_base", JsonWriter::mat3(plan.alpha2_base))
        .field("alpha2_perturbed", JsonWriter::mat3(plan.alpha2_perturbed))
        .num("certificate_error", plan.certificate_error)
        .num("gap", plan.gap)
        .num("min_eig_abs", plan.min_eig_abs)
        .num("perturbation_l2", plan.perturbation_l2);
    write_text_file(path("plan.json"), w.close() + "\n");
    write_text_file(path("perturbed.json"), field_to_json(flow) + "\n");
  }

  // Stage 2: electromotive tensor, both routes.
  const int K = std::max(cfg.trunc, cfg.j + 3);
  AlphaWorkspace ws(flow, K);
  const bool zero_flow = norm_l2(flow) == 0.0;
  double rm = 0.0, rm0 = 0.0;
  if (!zero_flow) {
    const SeriesRadius sr = estimate_rm0(ws, cfg.tol);
    rm0 = sr.rm0;
    rm = (cfg.rm == "auto") ? sr.rm0 / 4.0 : std::stod(cfg.rm);
  } else {
    rm = (cfg.rm == "auto") ? 1.0 : std::stod(cfg.rm);
  }
  AlphaTensor alpha;
  try {
    alpha = zero_flow ? make_alpha_tensor(Mat3{}, rm, "direct")
                      : alpha_direct(ws, rm, true, cfg.tol);
  } catch (const NumericalError& e) {
    rep.halted_stage = "alpha: " + std::string(to_string(e.kind()));
    throw;
  }
  alpha.diag.rm0 = rm0;
  write_text_file(path("alpha.json"), alpha_to_json(alpha));
  // Cross-check the two routes at a series-safe Reynolds number.
  if (!zero_flow) {
    const double rm_ref = std::min(rm, rm0 / 4.0);
    const AlphaTensor ser = alpha_series(ws, rm_ref, 12, cfg.tol);
    const AlphaTensor dir =
        (rm_ref == rm) ? alpha : alpha_direct(ws, rm_ref, false, cfg.tol);
    const double rel = frobenius_norm(ser.alpha - dir.alpha) /
                       std::max(frobenius_norm(dir.alpha), 1e-300);
    check("alpha_routes_agree", rel < 1e-6);
    JsonWriter w;
    w.num("rm_ref", rm_ref)
        .num("relative_frobenius_gap", rel)
        .field("series", alpha_to_json(ser))
        .field("direct", alpha_to_json(dir));
    write_text_file(path("alpha_check.json"), w.close() + "\n");
  }

  // Stage 3: large-scale prediction.
  LargeScaleMode mode;
  try {
    XiSearchSpec search;
    search.q_max = cfg.qmax;
    search.p_max = cfg.qmax;
    mode = find_xi(alpha, search, cfg.tol);
  } catch (const NumericalError& e) {
    rep.halted_stage = "predict: " + std::string(to_string(e.kind()));
    throw;
  }
  check("positive_rate", mode.rate.real() > 0);
  write_text_file(path("mode.json"), mode_to_json(mode));

  // Stage 4: modulated eigenvalue sweep. The direction is scaled down (a
  // rational scaling) until the whole eps range sits inside the growth
  // window eps < rm * lambda_plus / |xi|^2.
  RationalVec3 xi_sweep = mode.xi;
  {
    const double eps_max = cfg.eps_list.front();
    const double viable =
        rm * mode.lambda_plus / dot(mode.xi_value, mode.xi_value);
    if (viable < 2.0 * eps_max) {
      const int n = int(std::ceil(2.0 * eps_max / viable));
      for (auto& q : xi_sweep) q = Rational(q.num, q.den * n);
    }
  }
  SweepResult sweep = convergence_sweep(flow, rm, xi_sweep, K, cfg.eps_list, cfg.tol);
  write_text_file(path("bloch_sweep.csv"), sweep_to_csv(sweep));
  check("sweep_converging", sweep.outcome == SweepOutcome::Converging);
  check("sweep_slope", sweep.fit_slope >= 0.8);
  check("sweep_growing", sweep.all_growing);

  if (!cfg.run_evolution) {
    JsonWriter w;
    bool first = true;
    std::ostringstream checks_json;
    checks_json << "{";
    for (const auto& [k, v] : rep.checks) {
      if (!first) checks_json << ",";
      first = false;
      checks_json << '"' << k << "\":" << (v ? "true" : "false");
    }
    checks_json << "}";
    w.str("flow", cfg.flow)
        .num("rm", rm)
        .field("rate", JsonWriter::cplx(mode.rate))
        .field("checks", checks_json.str())
        .boolean("all_passed", rep.all_passed);
    rep.summary_json = w.close() + "\n";
    write_text_file(path("summary.json"), rep.summary_json);
    return rep;
  }

  // Stage 5: big torus, seeded mode, escape-time sweep.
  std::int64_t lcm = 1;
  for (const auto& q : mode.xi) lcm = std::lcm(lcm, q.num);
  Rational eps_box(1, int(cfg.box_scale * lcm));
  auto T = make_big_torus(mode.xi, eps_box);
  for (auto t : T)
    if (t > cfg.box_max)
      throw ValidationError("big torus period " + std::to_string(t) +
                            " exceeds box_max; set xi or box_scale explicitly");

  BlochOperator op(flow, rm, mode.xi_value, eps_box.value(), K);
  const Vec3d q_phys = eps_box.value() * mode.xi_value;
  const Complex seed_target(
      eps_box.value() * mode.rate.real() - dot(q_phys, q_phys) / rm,
      eps_box.value() * mode.rate.imag());
  EigenResult seed_eig;
  try {
    seed_eig = eigensolve_near(op, seed_target, nullptr, cfg.tol);
  } catch (const NumericalError& e) {
    rep.halted_stage = "seed-eigensolve: " + std::string(to_string(e.kind()));
    throw;
  }

  MhdSystem sys(flow, T, K, cfg.re, rm);
  const SeededMode seeded =
      seed_mode_on_big_torus(sys, op.to_field(seed_eig.eigenvector), mode.xi,
                             eps_box, seed_eig.eigenvalue);
  const double c0 =
      (cfg.c0 == "auto") ? 0.1 * norm_l2(sys.steady_flow()) : std::stod(cfg.c0);

  const RhoEstimate rho = estimate_rho(flow, T, K, rm, 4, cfg.tol);
  const double rho_hydro = hydro_block_slope(sys, 40.0);
  check("seeded_sector_dominant",
        seed_eig.eigenvalue.real() >= rho.rho - 1e-6 && rho.rho > rho_hydro);

  EvolveOptions opts;
  if (cfg.dt != "auto") opts.dt = std::stod(cfg.dt);
  std::vector<double> neg_log_delta, t_deltas;
  double rho_slope = 0.0;
  {
    // Linear growth cross-check over five e-folds.
    const double t_lin = 5.0 / std::max(seed_eig.eigenvalue.real(), 1e-3);
    rho_slope = linear_growth_slope(sys, seeded, t_lin, 0.5, opts.dt);
    check("linear_growth_match",
          std::abs(rho_slope - seed_eig.eigenvalue.real()) <=
              0.01 * std::abs(seed_eig.eigenvalue.real()));
  }
  bool monotone = true;
  double prev_t = -1e300;
  for (std::size_t i = 0; i < cfg.delta_list.size(); ++i) {
    const double delta = cfg.delta_list[i];
    const InstabilityRun run =
        run_instability(sys, seeded, delta, c0, cfg.horizon, opts);
    write_text_file(path("run_delta_" + std::to_string(i) + ".csv"),
                    run_to_csv(run));
    if (run.t_delta) {
      neg_log_delta.push_back(-std::log(delta));
      t_deltas.push_back(*run.t_delta);
      if (*run.t_delta < prev_t - 1e-9) monotone = false;
      prev_t = *run.t_delta;
    }
  }
  check("all_escaped", t_deltas.size() == cfg.delta_list.size());
  check("t_delta_monotone", monotone);
  LineFit fit = fit_line(neg_log_delta, t_deltas);
  check("fit_r2", fit.r2 >= 0.99);
  const double rho_used = rho.rho;
  check("slope_matches_rho",
        rho_used > 0 && std::abs(fit.slope - 1.0 / rho_used) <= 0.1 / rho_used);

  {
    std::ostringstream checks_json;
    checks_json << "{";
    bool first = true;
    for (const auto& [k, v] : rep.checks) {
      if (!first) checks_json << ",";
      first = false;
      checks_json << '"' << k << "\":" << (v ? "true" : "false");
    }
    checks_json << "}";
    JsonWriter w;
    w.str("flow", cfg.flow)
        .num("rm", rm)
        .num("re", cfg.re)
        .field("rate", JsonWriter::cplx(mode.rate))
        .field("seed_mu", JsonWriter::cplx(seed_eig.eigenvalue))
        .num("rho_eigen", rho_used)
        .num("rho_slope", rho_slope)
        .num("rho_hydro", rho_hydro)
        .num("c0", c0)
        .field("t_delta", JsonWriter::num_array(t_deltas))
        .field("fit", JsonWriter()
                          .num("slope", fit.slope)
                          .num("intercept", fit.intercept)
                          .num("r2", fit.r2)
                          .close())
        .field("checks", checks_json.str())
        .boolean("all_passed", rep.all_passed);
    rep.summary_json = w.close() + "\n";
    write_text_file(path("summary.json"), rep.summary_json);
  }
  return rep;
}

}  // namespace alphadyn
