#include "degwave/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "degwave/assembly.hpp"
#include "degwave/certificate.hpp"
#include "degwave/coefficients.hpp"
#include "degwave/config.hpp"
#include "degwave/diagnostics.hpp"
#include "degwave/dynamics.hpp"
#include "degwave/errors.hpp"
#include "degwave/spectral.hpp"

namespace degwave {

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::optional<unsigned long long> seed;
  bool optimize_delta = false;
};

RunConfig load_config(const CommonOpts& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : parse_config_file(o.config_path);
  for (const auto& ov : o.overrides) apply_override(c, ov);
  if (o.seed) c.seed = *o.seed;
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  validate(c);
  return c;
}

std::filesystem::path resolve_out(const RunConfig& c) {
  std::string dir = c.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("DEGWAVE_OUT");
    if (env && *env) dir = env;
  }
  if (dir.empty()) dir = ".";
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw UsageError("write failed for '" + path.string() + "'");
}

InitialSpec init_from(const RunConfig& c) {
  if (c.init_preset == "bump") return InitialSpec::preset_bump();
  if (c.init_preset == "cubic") return InitialSpec::preset_cubic();
  return InitialSpec::preset_ramp();
}

struct Pipeline {
  CoefficientProfile profile;
  WeightPair weights;
  HardyConstants hardy;
  DegeneracyReport report;
  OperatorMatrices matrices;
};

Pipeline build_pipeline(const RunConfig& c, const HardyConstants* hardy_in = nullptr) {
  CoefficientProfile profile = make_profile(c);
  WeightPair weights = feller_weight(profile);
  SpectralOptions sopt;
  sopt.n0 = c.spectral_n0;
  sopt.levels = c.spectral_levels;
  const HardyConstants hardy =
      hardy_in ? *hardy_in : best_constants(profile, weights, sopt);
  if (c.lambda_rel) profile = profile.with_lambda(*c.lambda_rel / hardy.c_hp_safe);
  DegeneracyReport report = check_hypotheses(profile, hardy);
  const Mesh mesh = c.mesh_q ? build_mesh(c.mesh_n, *c.mesh_q) : build_mesh(c.mesh_n, profile);
  AssemblyOptions aopts;
  aopts.quad_points = c.quad_points;
  OperatorMatrices matrices = assemble(profile, weights, mesh, aopts);
  return Pipeline{std::move(profile), std::move(weights), hardy, std::move(report),
                  std::move(matrices)};
}

json to_json(const DegeneracyReport& r) {
  return json{{"k_a", r.k_a},
              {"k_d", r.k_d},
              {"m_tilde", r.m_tilde},
              {"m", r.m},
              {"epsilon0", r.epsilon0},
              {"hyp1_ok", r.hyp1_ok},
              {"hyp2_ok", r.hyp2_ok},
              {"hyp3_ok", r.hyp3_ok},
              {"ass2_ok", r.ass2_ok},
              {"lambda_range_ok", r.lambda_range_ok},
              {"certificate_ready", r.certificate_ready()},
              {"well_posed", r.well_posed()},
              {"diagnostics", r.diagnostics}};
}

json to_json(const HardyConstants& h) {
  return json{{"c_hp", h.c_hp},
              {"c_hp_tilde", h.c_hp_tilde},
              {"c_hp_safe", h.c_hp_safe},
              {"c_hp_tilde_safe", h.c_hp_tilde_safe},
              {"margin", h.margin},
              {"extrapolated", h.extrapolated},
              {"finest_mesh_size", h.mesh_size},
              {"refinement_levels",
               json{{"c_hp", h.c_hp_levels}, {"c_hp_tilde", h.c_hp_tilde_levels}}}};
}

json to_json(const LambdaGauge& g) {
  return json{{"lambda", g.lambda},
              {"epsilon", g.epsilon ? json(*g.epsilon) : json(nullptr)},
              {"one_eps", g.one_eps},
              {"c_lambda", g.c_lambda}};
}

json to_json(const DecayCertificate& c) {
  json ledger = json::array();
  for (const auto& e : c.assumption_ledger)
    ledger.push_back(json{{"name", e.name}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"ok", e.ok}});
  return json{{"theta", c.theta},
              {"c1", c.c1},
              {"c2", c.c2},
              {"c3", c.c3},
              {"c4", c.c4},
              {"delta0", c.delta0},
              {"delta", c.delta},
              {"m_script", c.m_script},
              {"inv_m_script", 1.0 / c.m_script},
              {"lambda_hp_reading", c.lambda_hp_reading},
              {"gauge", to_json(c.gauge)},
              {"scalars",
               json{{"k_a", c.scalars.k_a},
                    {"k_d", c.scalars.k_d},
                    {"m", c.scalars.m},
                    {"epsilon0", c.scalars.epsilon0},
                    {"a1", c.scalars.a1},
                    {"d1", c.scalars.d1},
                    {"eta1", c.scalars.eta1},
                    {"sigma1", c.scalars.sigma1},
                    {"eta_min", c.scalars.eta_min},
                    {"eta_max", c.scalars.eta_max},
                    {"lambda", c.scalars.lambda},
                    {"beta", c.scalars.beta},
                    {"c_hp", c.scalars.c_hp},
                    {"c_hp_tilde", c.scalars.c_hp_tilde}}},
              {"assumption_ledger", ledger}};
}

json to_json(const IdentityReport& r) {
  return json{{"identity_name", r.identity_name},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"residual", r.residual},
              {"refinement_trend", r.refinement_trend},
              {"notes", r.notes}};
}

/// Worst relative slack of the discrete Hardy inequality over seeded random
/// nodal functions: min over draws of (u^T K u - u^T S u / c_hp) / u^T K u.
double hardy_random_min_slack(const OperatorMatrices& m, double c_hp, unsigned long long seed,
                              int draws) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = m.k_mat.size();
  std::vector<double> u(n);
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < draws; ++t) {
    for (double& x : u) x = dist(rng);
    const double num = m.k_mat.quad_form(u);
    const double den = m.s_mat.quad_form(u);
    worst = std::min(worst, (num - den / c_hp) / num);
  }
  return worst;
}

void write_trace_csv(const std::filesystem::path& path, const EnergyTrace& t) {
  std::string text = "t,E,y1,v1,diss_residual\n";
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    text += g17(t.times[k]);
    text += ',';
    text += g17(t.energy[k]);
    text += ',';
    text += g17(t.boundary_y[k]);
    text += ',';
    text += g17(t.boundary_v[k]);
    text += ',';
    text += g17(t.diss_residual[k]);
    text += '\n';
  }
  write_text(path, text);
}

int run_check(const CommonOpts& opts) {
  const RunConfig c = load_config(opts);
  const Pipeline p = build_pipeline(c);
  json out = to_json(p.report);
  out["hardy"] = to_json(p.hardy);
  out["lambda"] = p.profile.lambda();
  out["beta_damp"] = p.profile.beta_damp();
  const auto dir = resolve_out(c);
  write_text(dir / "check.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  if (p.report.certificate_ready()) return 0;
  for (const auto& d : p.report.diagnostics) std::cerr << "violated: " << d << "\n";
  return p.report.structure_ok() ? 3 : 2;
}

int run_certify(const CommonOpts& opts) {
  const RunConfig c = load_config(opts);
  const Pipeline p = build_pipeline(c);
  CertificateOptions copts;
  copts.optimize_delta = opts.optimize_delta;
  // throws (exit 2/3) before anything is written
  const DecayCertificate cert = compute_certificate(p.profile, p.report, p.weights, p.hardy, copts);
  json out;
  out["hardy"] = to_json(p.hardy);
  out["report"] = to_json(p.report);
  out["certificate"] = to_json(cert);
  out["hardy_random_min_slack"] =
      hardy_random_min_slack(p.matrices, p.hardy.c_hp_safe, c.seed, 1000);
  out["seed"] = c.seed;
  out["mesh"] = json{{"n", c.mesh_n}, {"q", p.matrices.mesh.q}};
  const auto dir = resolve_out(c);
  write_text(dir / "certify.json", out.dump(2) + "\n");
  std::cout << "certified: E(t) <= E(0) exp(1 - t/M) for t >= M with M = " << g17(cert.m_script)
            << "\n";
  std::cout << "wrote " << (dir / "certify.json").string() << "\n";
  return 0;
}

int run_simulate(const CommonOpts& opts) {
  const RunConfig c = load_config(opts);
  const Pipeline p = build_pipeline(c);
  SimOptions sopts;
  sopts.dt = c.dt;
  sopts.t_final = c.t_final;
  sopts.stride = c.stride;
  sopts.init = init_from(c);
  const SimResult r = simulate(p.profile, p.matrices, p.report, sopts);
  const auto dir = resolve_out(c);
  write_trace_csv(dir / "trace.csv", r.trace);
  std::cout << "simulated " << r.trace.steps << " steps, E(0) = " << g17(r.trace.e0)
            << ", E(T) = " << g17(r.trace.energy.back())
            << ", dissipation residual = " << g17(dissipation_residual(r.trace)) << "\n";
  std::cout << "wrote " << (dir / "trace.csv").string() << "\n";
  return 0;
}

struct VerifyOutcome {
  DecayCertificate cert;
  DecayCheck check;
  std::optional<DecayFit> fit;
  double horizon = 0.0;
  double dt = 0.0;
  int stride = 1;
  EnergyTrace trace;
};

VerifyOutcome run_decay_verification(const RunConfig& c, const Pipeline& p, bool optimize_delta,
                                     double max_rows) {
  CertificateOptions copts;
  copts.optimize_delta = optimize_delta;
  VerifyOutcome out{compute_certificate(p.profile, p.report, p.weights, p.hardy, copts),
                    {}, {}, 0.0, 0.0, 1, {}};
  out.horizon = std::max(3.0 * out.cert.m_script, 20.0);
  out.dt = std::max(c.dt, out.horizon / 1e7);
  const double steps = std::ceil(out.horizon / out.dt);
  out.stride = static_cast<int>(std::max(1.0, std::ceil(steps / max_rows)));
  SimOptions sopts;
  sopts.dt = out.dt;
  sopts.t_final = out.horizon;
  sopts.stride = out.stride;
  sopts.init = init_from(c);
  out.trace = simulate(p.profile, p.matrices, p.report, sopts).trace;
  out.check = verify_decay_bound(out.trace, out.cert);
  try {
    out.fit = fit_decay_rate(out.trace, 0.2 * out.horizon);
  } catch (const Error&) {
    // energy underflowed or too few usable samples: report the bound only
  }
  return out;
}

int run_verify(const CommonOpts& opts) {
  const RunConfig c = load_config(opts);
  const Pipeline p = build_pipeline(c);
  const VerifyOutcome v = run_decay_verification(c, p, opts.optimize_delta, 2e5);
  json out;
  out["m_script"] = v.cert.m_script;
  out["horizon"] = v.horizon;
  out["dt"] = v.dt;
  out["stride"] = v.stride;
  out["bound_holds"] = v.check.holds;
  out["margin"] = finite_or_null(v.check.margin);
  out["samples_checked"] = v.check.samples_checked;
  out["first_violation_time"] =
      v.check.first_violation_time ? json(*v.check.first_violation_time) : json(nullptr);
  if (v.fit) {
    out["fitted_rate"] = v.fit->rate;
    out["fit_r_squared"] = v.fit->r_squared;
    out["certified_rate"] = 1.0 / v.cert.m_script;
  } else {
    out["fitted_rate"] = nullptr;
    out["fit_r_squared"] = nullptr;
    out["certified_rate"] = 1.0 / v.cert.m_script;
  }
  const auto dir = resolve_out(c);
  write_text(dir / "verify.json", out.dump(2) + "\n");
  std::cout << (v.check.holds ? "decay bound holds" : "decay bound VIOLATED")
            << " on [0, " << g17(v.horizon) << "], M = " << g17(v.cert.m_script) << "\n";
  std::cout << "wrote " << (dir / "verify.json").string() << "\n";
  if (!v.check.holds) throw NumericalError("certified decay bound violated at t = " +
                                           g17(*v.check.first_violation_time));
  return 0;
}

int run_diagnose(const CommonOpts& opts) {
  const RunConfig c = load_config(opts);
  const Pipeline p = build_pipeline(c);
  // joint space-time refinement ladder; boundary-compatible initial data so
  // the simulated solution is classical from t = 0
  const std::vector<std::pair<int, double>> ladder = {{128, 2e-3}, {256, 1e-3}, {512, 5e-4}};
  IdentityReport multiplier, boundary_split;
  std::vector<double> trend_m, trend_b;
  for (const auto& [n, dt] : ladder) {
    RunConfig lvl = c;
    lvl.mesh_n = n;
    const Mesh mesh =
        lvl.mesh_q ? build_mesh(n, *lvl.mesh_q) : build_mesh(n, p.profile);
    AssemblyOptions aopts;
    aopts.quad_points = c.quad_points;
    const OperatorMatrices mats = assemble(p.profile, p.weights, mesh, aopts);
    SimOptions sopts;
    sopts.dt = dt;
    sopts.t_final = c.diag_t;
    sopts.stride = 1;
    sopts.init = InitialSpec::preset_cubic();
    sopts.store_trajectory = true;
    sopts.store_from = c.diag_s;
    sopts.store_to = c.diag_t;
    const SimResult r = simulate(p.profile, mats, p.report, sopts);
    multiplier = multiplier_residual(*r.trajectory, p.profile, c.diag_s, c.diag_t);
    boundary_split = bt_identity_residual(*r.trajectory, p.profile, c.diag_s, c.diag_t);
    trend_m.push_back(multiplier.residual);
    trend_b.push_back(boundary_split.residual);
    std::cout << "N = " << n << ", dt = " << dt << ": multiplier residual " << g17(multiplier.residual)
              << ", boundary-split residual " << g17(boundary_split.residual) << "\n";
  }
  multiplier.refinement_trend = trend_m;
  boundary_split.refinement_trend = trend_b;
  json out = json::array({to_json(multiplier), to_json(boundary_split)});
  const auto dir = resolve_out(c);
  write_text(dir / "diagnose.json", out.dump(2) + "\n");
  std::cout << "wrote " << (dir / "diagnose.json").string() << "\n";
  return 0;
}

int run_sweep(const CommonOpts& opts) {
  const RunConfig base = load_config(opts);
  if (base.sweep_parameter.empty() || base.sweep_count < 2)
    throw UsageError("sweep needs sweep.parameter and sweep.count >= 2");
  const std::vector<std::string> allowed = {"lambda",    "lambda.rel", "beta_damp", "a.alpha",
                                            "b.mu",      "b.beta",     "d.gamma"};
  if (std::find(allowed.begin(), allowed.end(), base.sweep_parameter) == allowed.end())
    throw UsageError("sweep.parameter '" + base.sweep_parameter + "' is not sweepable");
  // lambda and the boundary gain leave the coefficients (and hence the Hardy
  // constants) alone; sharing the ladder across values saves most of the work
  const bool shares_geometry =
      base.sweep_parameter == "lambda" || base.sweep_parameter == "lambda.rel" ||
      base.sweep_parameter == "beta_damp";
  std::optional<HardyConstants> shared;
  if (shares_geometry) {
    const CoefficientProfile profile = make_profile(base);
    const WeightPair weights = feller_weight(profile);
    SpectralOptions sopt;
    sopt.n0 = base.spectral_n0;
    sopt.levels = base.spectral_levels;
    shared = best_constants(profile, weights, sopt);
  }

  struct Row {
    double value = 0.0;
    double inv_m = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN();
    std::string holds = "refused";
    std::string note;
  };
  auto task = [&](double value) -> Row {
    Row row;
    row.value = value;
    try {
      RunConfig c = base;
      apply_override(c, base.sweep_parameter + "=" + g17(value));
      validate(c);
      const Pipeline p = build_pipeline(c, shared ? &*shared : nullptr);
      const VerifyOutcome v = run_decay_verification(c, p, opts.optimize_delta, 2e4);
      row.inv_m = 1.0 / v.cert.m_script;
      if (v.fit) row.rate = v.fit->rate;
      row.holds = v.check.holds ? "true" : "false";
    } catch (const Error& e) {
      row.note = e.what();
    }
    return row;
  };

  std::vector<double> values(base.sweep_count);
  for (int i = 0; i < base.sweep_count; ++i)
    values[i] = base.sweep_from +
                (base.sweep_to - base.sweep_from) * i / (base.sweep_count - 1.0);
  std::vector<std::future<Row>> futures;
  futures.reserve(values.size());
  for (double v : values) futures.push_back(std::async(std::launch::async, task, v));

  std::string csv = "value,inv_m_script,fitted_rate,bound_holds\n";
  for (auto& f : futures) {
    const Row row = f.get();
    csv += g17(row.value);
    csv += ',';
    csv += g17(row.inv_m);
    csv += ',';
    csv += g17(row.rate);
    csv += ',';
    csv += row.holds;
    csv += '\n';
    if (!row.note.empty())
      std::cerr << base.sweep_parameter << " = " << g17(row.value) << " refused: " << row.note
                << "\n";
  }
  const auto dir = resolve_out(base);
  write_text(dir / "sweep.csv", csv);
  std::cout << "wrote " << (dir / "sweep.csv").string() << " (" << values.size() << " rows)\n";
  return 0;
}

void add_common(CLI::App* sub, CommonOpts& opts, bool with_delta) {
  sub->add_option("-c,--config", opts.config_path, "key = value configuration file");
  sub->add_option("-O,--override", opts.overrides, "config override key=value (repeatable)");
  sub->add_option("-o,--out", opts.out_dir, "output directory (default: $DEGWAVE_OUT or .)");
  sub->add_option("--seed", opts.seed, "seed for randomized checks");
  if (with_delta)
    sub->add_flag("--optimize-delta", opts.optimize_delta,
                  "minimize the decay time over a delta grid instead of delta_0/2");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"boundary-damped degenerate wave equation: simulation and decay certificates"};
  app.require_subcommand(1);
  CommonOpts opts;
  int (*handler)(const CommonOpts&) = nullptr;

  auto* check = app.add_subcommand("check", "evaluate coefficient hypotheses and exponents");
  add_common(check, opts, false);
  check->callback([&] { handler = &run_check; });
  auto* certify = app.add_subcommand("certify", "compute Hardy constants and the decay certificate");
  add_common(certify, opts, true);
  certify->callback([&] { handler = &run_certify; });
  auto* sim = app.add_subcommand("simulate", "time-integrate the damped system, write the trace");
  add_common(sim, opts, false);
  sim->callback([&] { handler = &run_simulate; });
  auto* verify = app.add_subcommand("verify", "simulate to 3M and check the certified bound");
  add_common(verify, opts, true);
  verify->callback([&] { handler = &run_verify; });
  auto* diagnose =
      app.add_subcommand("diagnose", "evaluate the multiplier identities under refinement");
  add_common(diagnose, opts, false);
  diagnose->callback([&] { handler = &run_diagnose; });
  auto* sweep = app.add_subcommand("sweep", "repeat certification over a parameter range");
  add_common(sweep, opts, true);
  sweep->callback([&] { handler = &run_sweep; });

  try {
    app.parse(argc, argv);
    if (!handler) throw UsageError("no subcommand selected");
    return handler(opts);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace degwave
