// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: computes electromotive tensors of periodic flows,
// builds spectrum-splitting perturbations, predicts long-wave growth rates,
// sweeps the modulated eigenvalue branch, and measures nonlinear escape
// times on the enlarged torus.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "alphadyn/pipeline.hpp"

using namespace alphadyn;

namespace {

RationalVec3 parse_xi(const std::string& s) {
  RationalVec3 xi;
  std::stringstream ss(s);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',') && i < 3) xi[i++] = parse_rational(item);
  if (i != 3) throw ValidationError("xi must be three comma-separated rationals");
  return xi;
}

std::vector<double> parse_eps_spec(const std::string& s) {
  // Either "2^-4..2^-9" or a comma list of floats.
  if (s.find("..") != std::string::npos) {
    const auto dots = s.find("..");
    const auto parse_pow = [](const std::string& t) {
      if (t.rfind("2^", 0) == 0) return int(-std::stoi(t.substr(2)));
      throw ValidationError("eps range bounds look like 2^-4");
    };
    const int a = parse_pow(s.substr(0, dots));
    const int b = parse_pow(s.substr(dots + 2));
    if (b < a) throw ValidationError("eps range must decrease");
    std::vector<double> out;
    for (int p = a; p <= b; ++p) out.push_back(std::pow(2.0, -p));
    return out;
  }
  return detail::parse_double_list(s);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_text_file(out_path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-effect dynamo toolkit"};
  app.require_subcommand(1);

  // flow: materialize a preset
  auto* cmd_flow = app.add_subcommand("flow", "write a named preset flow as JSON");
  std::string flow_preset = "abc", flow_out;
  cmd_flow->add_option("--preset", flow_preset, "zero | abc | vfields:J");
  cmd_flow->add_option("--out", flow_out, "output path (default stdout)");

  auto* cmd_presets = app.add_subcommand("presets", "list named preset flows");

  // alpha
  auto* cmd_alpha = app.add_subcommand("alpha", "electromotive tensor of a flow");
  std::string a_flow, a_rm = "auto", a_method = "direct", a_out;
  int a_terms = 12, a_trunc = 6;
  cmd_alpha->add_option("--flow", a_flow, "flow JSON file")->required();
  cmd_alpha->add_option("--rm", a_rm, "Reynolds number or 'auto'");
  cmd_alpha->add_option("--method", a_method, "direct | series | alpha2");
  cmd_alpha->add_option("--terms", a_terms, "series terms");
  cmd_alpha->add_option("--trunc", a_trunc, "spectral truncation K");
  cmd_alpha->add_option("--out", a_out, "output path (default stdout)");

  // perturb
  auto* cmd_pert = app.add_subcommand("perturb", "spectrum-splitting perturbation");
  std::string p_flow, p_deltas, p_out;
  int p_j = 1;
  double p_gap = 0.05, p_hs = 0.0;
  cmd_pert->add_option("--flow", p_flow, "flow JSON file")->required();
  cmd_pert->add_option("--j", p_j, "truncation order");
  cmd_pert->add_option("--gap", p_gap, "target eigenvalue gap");
  cmd_pert->add_option("--deltas", p_deltas, "explicit d1,d2,d3 (skips the search)");
  cmd_pert->add_option("--hs", p_hs, "also report the H^s norm of the bump");
  cmd_pert->add_option("--out", p_out, "output path (default stdout)");

  // predict
  auto* cmd_pred = app.add_subcommand("predict", "long-wave growth prediction");
  std::string d_alpha, d_xi, d_out;
  int d_qmax = 8;
  cmd_pred->add_option("--alpha", d_alpha, "alpha JSON file")->required();
  cmd_pred->add_option("--qmax", d_qmax, "rational direction bound");
  cmd_pred->add_option("--xi", d_xi, "explicit direction p/q,p/q,p/q");
  cmd_pred->add_option("--out", d_out, "output path (default stdout)");

  // bloch-sweep
  auto* cmd_sweep = app.add_subcommand("bloch-sweep",
                                       "modulated eigenvalue branch vs eps");
  std::string s_flow, s_xi = "1,1,1", s_eps = "2^-4..2^-9", s_out;
  double s_rm = 0.25;
  int s_K = 8;
  cmd_sweep->add_option("--flow", s_flow, "flow JSON file")->required();
  cmd_sweep->add_option("--rm", s_rm, "Reynolds number")->required();
  cmd_sweep->add_option("--xi", s_xi, "direction p/q,p/q,p/q");
  cmd_sweep->add_option("--K", s_K, "spectral truncation");
  cmd_sweep->add_option("--eps", s_eps, "range 2^-4..2^-9 or comma list");
  cmd_sweep->add_option("--out", s_out, "CSV output path (default stdout)");
  std::string s_mode_out, s_mode_eps;
  cmd_sweep->add_option("--mode-out", s_mode_out,
                        "also write the eigenmode at --mode-eps as JSON");
  cmd_sweep->add_option("--mode-eps", s_mode_eps,
                        "rational eps for --mode-out, e.g. 1/4");

  // evolve
  auto* cmd_ev = app.add_subcommand("evolve", "escape-time runs on the big torus");
  std::string e_flow, e_mode, e_delta = "1e-3,1e-4,1e-5,1e-6", e_c0 = "auto",
              e_dt = "auto", e_outdir = "evolve-out";
  double e_horizon = 400.0, e_re = 0.5, e_rm = 0.0;
  int e_K = 5;
  bool e_linear = false;
  cmd_ev->add_option("--flow", e_flow, "flow JSON file")->required();
  cmd_ev->add_option("--mode", e_mode, "mode JSON file (from bloch eigensolve)")
      ->required();
  cmd_ev->add_option("--delta", e_delta, "comma list of seed amplitudes");
  cmd_ev->add_option("--c0", e_c0, "escape threshold or 'auto'");
  cmd_ev->add_option("--horizon", e_horizon, "time horizon");
  cmd_ev->add_option("--dt", e_dt, "time step or 'auto'");
  cmd_ev->add_option("--re", e_re, "kinetic Reynolds number");
  cmd_ev->add_option("--rm", e_rm, "magnetic Reynolds number (default: mode file)");
  cmd_ev->add_option("--K", e_K, "unit-cell truncation");
  cmd_ev->add_flag("--linear-only", e_linear, "disable the quadratic terms");
  cmd_ev->add_option("--outdir", e_outdir, "output directory");

  // pipeline
  auto* cmd_pipe = app.add_subcommand("pipeline", "full constructive chain");
  std::string c_config, c_outdir = "pipeline-out";
  cmd_pipe->add_option("--config", c_config, "key=value config file");
  cmd_pipe->add_option("--outdir", c_outdir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_flow) {
      emit(flow_out, field_to_json(make_preset(flow_preset)) + "\n");
    } else if (*cmd_presets) {
      for (const auto& p : presets()) {
        std::cout << p.name << ": " << p.description << "\n";
        for (const auto& t : p.symmetry_tags) std::cout << "  - " << t << "\n";
      }
    } else if (*cmd_alpha) {
      FourierVectorField u = load_field(a_flow);
      AlphaWorkspace ws(u, a_trunc);
      AlphaTensor t;
      if (a_method == "alpha2") {
        t = alpha2_tensor(embed(u, a_trunc));
      } else {
        double rm0 = 0.0;
        double rm;
        if (a_rm == "auto") {
          const auto sr = estimate_rm0(ws);
          rm0 = sr.rm0;
          rm = sr.rm0 / 4.0;
        } else {
          rm = std::stod(a_rm);
        }
        t = (a_method == "series") ? alpha_series(ws, rm, a_terms)
                                   : alpha_direct(ws, rm, true);
        t.diag.rm0 = rm0;
      }
      emit(a_out, alpha_to_json(t));
    } else if (*cmd_pert) {
      FourierVectorField u = load_field(p_flow);
      PerturbationPlan plan;
      if (!p_deltas.empty()) {
        const auto d = detail::parse_double_list(p_deltas);
        if (d.size() != 3) throw ValidationError("--deltas needs three values");
        plan = perturb(u, p_j, {d[0], d[1], d[2]});
      } else {
        plan = choose_deltas(u, p_j, p_gap);
      }
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
      if (p_hs > 0) {
        FourierVectorField bump = plan.perturbed;
        bump -= plan.base;
        w.num("perturbation_hs", norm_hs(bump, p_hs));
      }
      w.field("perturbed", field_to_json(plan.perturbed));
      emit(p_out, w.close() + "\n");
    } else if (*cmd_pred) {
      nlohmann::json j;
      std::ifstream in(d_alpha);
      if (!in) throw ValidationError("cannot open '" + d_alpha + "'");
      in >> j;
      const AlphaTensor t = alpha_from_json(j);
      LargeScaleMode mode;
      if (!d_xi.empty()) {
        mode = predict_mode(t, parse_xi(d_xi));
        mode.selection = "explicit --xi";
      } else {
        XiSearchSpec search;
        search.q_max = d_qmax;
        search.p_max = d_qmax;
        mode = find_xi(t, search);
      }
      emit(d_out, mode_to_json(mode));
    } else if (*cmd_sweep) {
      FourierVectorField u = load_field(s_flow);
      const auto sw = convergence_sweep(u, s_rm, parse_xi(s_xi), s_K,
                                        parse_eps_spec(s_eps));
      if (sw.outcome == SweepOutcome::NoUnstableBranch) {
        std::cerr << "NoUnstableBranch: no growing long-wave mode\n";
        emit(s_out, sweep_to_csv(sw));
      } else if (sw.outcome == SweepOutcome::BranchLoss) {
        emit(s_out, sweep_to_csv(sw));
        throw NumericalError(NumericalError::Kind::BranchLoss,
                             "continuation lost the branch at eps = " +
                                 std::to_string(sw.failed_eps));
      } else {
        emit(s_out, sweep_to_csv(sw));
        std::cerr << "rate_ref = " << fmt17(sw.rate_ref.real()) << " "
                  << fmt17(sw.rate_ref.imag()) << "i, slope = "
                  << fmt17(sw.fit_slope) << ", all growing = "
                  << (sw.all_growing ? "yes" : "no") << "\n";
      }
      if (!s_mode_out.empty()) {
        if (s_mode_eps.empty())
          throw ValidationError("--mode-out needs --mode-eps");
        const Rational eps = parse_rational(s_mode_eps);
        const RationalVec3 xi = parse_xi(s_xi);
        BlochOperator op(u, s_rm, value(xi), eps.value(), s_K);
        const Vec3d q = eps.value() * value(xi);
        const Complex target(eps.value() * sw.rate_ref.real() - dot(q, q) / s_rm,
                             eps.value() * sw.rate_ref.imag());
        const EigenResult er = eigensolve_near(op, target);
        JsonWriter w;
        w.field("xi", JsonWriter::rationals(xi))
            .field("epsilon", JsonWriter::int_array({eps.num, eps.den}))
            .field("mu", JsonWriter::cplx(er.eigenvalue))
            .num("rm", s_rm)
            .num("residual", er.residual)
            .field("field", field_to_json(op.to_field(er.eigenvector)));
        write_text_file(s_mode_out, w.close() + "\n");
      }
    } else if (*cmd_ev) {
      FourierVectorField u = load_field(e_flow);
      nlohmann::json j;
      std::ifstream in(e_mode);
      if (!in) throw ValidationError("cannot open mode file '" + e_mode + "'");
      in >> j;
      RationalVec3 xi;
      for (int a = 0; a < 3; ++a)
        xi[a] = Rational(j.at("xi").at(a).at(0).get<std::int64_t>(),
                         j.at("xi").at(a).at(1).get<std::int64_t>());
      const Rational eps(j.at("epsilon").at(0).get<std::int64_t>(),
                         j.at("epsilon").at(1).get<std::int64_t>());
      const Complex mu(j.at("mu").at(0).get<double>(),
                       j.at("mu").at(1).get<double>());
      const FourierVectorField eigvec = field_from_json(j.at("field"));
      const double rm = e_rm > 0 ? e_rm : j.at("rm").get<double>();

      const auto T = make_big_torus(xi, eps);
      MhdSystem sys(u, T, e_K, e_re, rm);
      const auto seeded = seed_mode_on_big_torus(sys, eigvec, xi, eps, mu);
      const double c0 =
          (e_c0 == "auto") ? 0.1 * norm_l2(sys.steady_flow()) : std::stod(e_c0);
      EvolveOptions opts;
      if (e_dt != "auto") opts.dt = std::stod(e_dt);

      std::filesystem::create_directories(e_outdir);
      const RhoEstimate rho = estimate_rho(u, T, e_K, rm);
      std::vector<double> neg_log_delta, t_deltas;
      const auto deltas = detail::parse_double_list(e_delta);
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto run = run_instability(sys, seeded, deltas[i], c0, e_horizon,
                                         opts, e_linear);
        write_text_file((std::filesystem::path(e_outdir) /
                         ("run_delta_" + std::to_string(i) + ".csv"))
                            .string(),
                        run_to_csv(run));
        for (const auto& wmsg : run.warnings) std::cerr << wmsg << "\n";
        if (run.t_delta) {
          neg_log_delta.push_back(-std::log(deltas[i]));
          t_deltas.push_back(*run.t_delta);
        }
      }
      const double t_lin = 5.0 / std::max(mu.real(), 1e-3);
      const double rho_slope = linear_growth_slope(sys, seeded, t_lin, 0.5, opts.dt);
      const LineFit fit = fit_line(neg_log_delta, t_deltas);
      JsonWriter w;
      w.field("delta", JsonWriter::num_array(deltas))
          .field("t_delta", JsonWriter::num_array(t_deltas))
          .num("rho_eigen", rho.rho)
          .num("rho_slope", rho_slope)
          .num("c0", c0)
          .field("fit", JsonWriter()
                            .num("slope", fit.slope)
                            .num("intercept", fit.intercept)
                            .num("r2", fit.r2)
                            .close());
      const std::string summary = w.close() + "\n";
      write_text_file(
          (std::filesystem::path(e_outdir) / "summary.json").string(), summary);
      std::cout << summary;
    } else if (*cmd_pipe) {
      PipelineConfig cfg;
      if (!c_config.empty()) cfg = parse_config(slurp(c_config));
      const PipelineReport rep = run_pipeline(cfg, c_outdir);
      std::cout << rep.summary_json;
      if (!rep.all_passed) return 4;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure [" << to_string(e.kind()) << "]: " << e.what()
              << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
