// Acceptance harness: nine go/no-go checks of the full pipeline, printed one
// verdict line each.  Exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "degwave/assembly.hpp"
#include "degwave/certificate.hpp"
#include "degwave/cli.hpp"
#include "degwave/coefficients.hpp"
#include "degwave/diagnostics.hpp"
#include "degwave/dynamics.hpp"
#include "degwave/errors.hpp"
#include "degwave/spectral.hpp"
#include "helpers.hpp"

using namespace degwave;

namespace {

int g_failed = 0;

using Verdict = std::pair<bool, std::string>;

void run_criterion(int num, const std::string& what, const std::function<Verdict()>& body) {
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("unexpected exception: ") + e.what()};
  }
  std::printf("[%s] criterion %d: %s%s%s\n", v.first ? "PASS" : "FAIL", num, what.c_str(),
              v.second.empty() ? "" : " -- ", v.second.c_str());
  std::fflush(stdout);
  if (!v.first) ++g_failed;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[256];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

/// one geometry of the test matrix: coefficients, weights, Hardy ladder
struct Geometry {
  CoefficientProfile base;
  WeightPair weights;
  HardyConstants hardy;
  DegeneracyReport base_report;
  OperatorMatrices matrices;  // N = 128, graded by the profile
};

Geometry make_geometry(double alpha, double gamma_d) {
  auto base = CoefficientProfile::power_law(alpha, 0.1, 1.0, gamma_d, 0.0, 1.0);
  auto weights = feller_weight(base);
  SpectralOptions sopts;
  sopts.n0 = 64;
  sopts.levels = 4;
  auto hardy = best_constants(base, weights, sopts);
  auto report = check_hypotheses(base, hardy);
  auto matrices = assemble(base, weights, build_mesh(128, base));
  return Geometry{std::move(base), std::move(weights), hardy, std::move(report),
                  std::move(matrices)};
}

/// one admissible configuration of the matrix, simulated to 3 M
struct MatrixRun {
  std::string label;
  DecayCertificate cert;
  EnergyTrace trace;
};

MatrixRun run_config(const Geometry& g, double lambda, double beta) {
  const PowerLawParams pp = g.base.power();
  auto profile =
      CoefficientProfile::power_law(pp.alpha, pp.mu, pp.beta_b, pp.gamma_d, lambda, beta);
  auto report = check_hypotheses(profile, g.hardy);
  if (!report.certificate_ready())
    throw HypothesisError("matrix configuration unexpectedly refused");
  auto cert = compute_certificate(profile, report, g.weights, g.hardy);

  SimOptions opts;
  opts.t_final = std::max(3.0 * cert.m_script, 20.0);
  opts.dt = std::max(0.01, opts.t_final / 2e6);
  const double steps = std::ceil(opts.t_final / opts.dt);
  opts.stride = static_cast<int>(std::max(1.0, std::ceil(steps / 2e5)));
  opts.init = InitialSpec::preset_cubic();

  MatrixRun run;
  run.label = fmt("alpha=%g beta=%g lambda=%.4f", profile.power().alpha, beta, lambda);
  run.trace = simulate(profile, g.matrices, report, opts).trace;
  run.cert = std::move(cert);
  return run;
}

/// capture of an in-process CLI invocation
struct CliCapture {
  int code = -1;
  std::string err;
};

CliCapture invoke_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("degwave");
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  auto* ob = std::cout.rdbuf(out.rdbuf());
  auto* eb = std::cerr.rdbuf(err.rdbuf());
  CliCapture cap;
  try {
    cap.code = run_cli(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(ob);
    std::cerr.rdbuf(eb);
    throw;
  }
  std::cout.rdbuf(ob);
  std::cerr.rdbuf(eb);
  cap.err = err.str();
  return cap;
}

}  // namespace

int main() {
  std::printf("acceptance checks for the boundary-damped degenerate wave laboratory\n");

  // shared geometries: weakly degenerate (alpha < 1) and strongly degenerate
  // the strongly degenerate geometry needs K_a + 2 K_d + 2 sup(x|b|/a) < 2,
  // so the drift mu = 0.1 leaves room only for gamma_d < 0.15
  std::optional<Geometry> wd_store, sd_store;
  try {
    wd_store = make_geometry(0.5, 0.25);
    sd_store = make_geometry(1.5, 0.1);
  } catch (const std::exception& e) {
    std::printf("[FAIL] setup: %s\n", e.what());
    return 1;
  }
  Geometry& wd = *wd_store;
  Geometry& sd = *sd_store;

  // ---- 1: exact dissipation identity on the reference run ----------------
  EnergyTrace reference_trace;
  DecayCertificate reference_cert;
  run_criterion(1, "exact dissipation identity on the reference run", [&]() -> Verdict {
    const auto t0 = std::chrono::steady_clock::now();
    const double lambda = 0.05 / wd.hardy.c_hp_safe;
    auto profile = wd.base.with_lambda(lambda);
    auto report = check_hypotheses(profile, wd.hardy);
    auto matrices = assemble(profile, wd.weights, build_mesh(256, profile));
    reference_cert = compute_certificate(profile, report, wd.weights, wd.hardy);

    SimOptions opts;
    opts.dt = 1e-3;
    opts.t_final = 20.0;
    opts.stride = 1;
    opts.init = InitialSpec::preset_cubic();
    reference_trace = simulate(profile, matrices, report, opts).trace;

    double worst = 0.0;
    for (double r : reference_trace.diss_residual) worst = std::max(worst, r);
    const double tol = 1e-10 * reference_trace.e0;
    const double dt_wall = seconds_since(t0);
    const bool pass = worst <= tol && dt_wall <= 10.0;
    return {pass, fmt("max step defect %.2e vs tol %.2e, %.1f s", worst, tol, dt_wall)};
  });

  // ---- 2: stepwise energy monotonicity across the test matrix ------------
  std::vector<MatrixRun> matrix;
  run_criterion(2, "stepwise energy monotonicity across the 12-configuration matrix",
                [&]() -> Verdict {
    for (const Geometry* g : {&wd, &sd}) {
      const double lp = 0.3 / g->hardy.c_hp_safe;
      const double lm = -0.5 * g->base_report.epsilon0 /
                        (2.0 * g->hardy.c_hp_safe *
                         (1.0 + 1.5 * g->base_report.k_a + g->base_report.k_d +
                          g->base_report.m));
      for (double beta : {0.0, 1.0, 5.0})
        for (double lambda : {lp, lm}) matrix.push_back(run_config(*g, lambda, beta));
    }
    double worst_rel = 0.0;
    std::string worst_label = "none";
    for (const auto& run : matrix) {
      const double rel = run.trace.max_energy_jump / run.trace.e0;
      if (rel > worst_rel) {
        worst_rel = rel;
        worst_label = run.label;
      }
    }
    const bool pass = matrix.size() == 12 && worst_rel <= 1e-10;
    return {pass, fmt("%zu runs, worst relative energy jump %.2e (%s)", matrix.size(),
                      worst_rel, worst_label.c_str())};
  });

  // ---- 3: discrete Hardy inequality and analytic ceilings -----------------
  run_criterion(3, "discrete Hardy inequality and analytic constant ceilings",
                [&]() -> Verdict {
    const auto t0 = std::chrono::steady_clock::now();
    auto big = assemble(wd.base, wd.weights, build_mesh(256, wd.base));
    std::mt19937_64 rng(20240901ULL);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> u(big.k_mat.size());
    double min_slack = std::numeric_limits<double>::infinity();
    for (int draw = 0; draw < 1000; ++draw) {
      for (double& x : u) x = dist(rng);
      const double num = big.k_mat.quad_form(u);
      const double den = big.s_mat.quad_form(u);
      min_slack = std::min(min_slack, (num - den / wd.hardy.c_hp) / num);
    }

    auto analytic = CoefficientProfile::power_law(1.0, 0.0, 1.0, 0.5, 0.0, 1.0);
    auto w = feller_weight(analytic);
    SpectralOptions sopts;
    sopts.n0 = 64;
    sopts.levels = 4;
    auto hardy = best_constants(analytic, w, sopts);

    const double dt_wall = seconds_since(t0);
    const bool pass = min_slack >= -1e-10 && hardy.c_hp <= 2.0 + 1e-6 &&
                      hardy.c_hp_tilde <= 1.0 + 1e-6 && dt_wall <= 5.0;
    return {pass, fmt("min slack %.2e over 1000 draws, C_HP %.4f <= 2, C~ %.4f <= 1, %.1f s",
                      min_slack, hardy.c_hp, hardy.c_hp_tilde, dt_wall)};
  });

  // ---- 4: steady-state norm estimates on random admissible tuples --------
  run_criterion(4, "steady-state norm estimates on 100 random admissible tuples",
                [&]() -> Verdict {
    std::mt19937_64 rng(424242ULL);
    std::uniform_real_distribution<double> ua(0.1, 1.3);
    std::uniform_real_distribution<double> ur(0.3, 2.0);
    std::uniform_real_distribution<double> umu(-0.25, 0.25);
    std::uniform_real_distribution<double> ubeta(0.0, 5.0);
    std::uniform_real_distribution<double> uload(-10.0, 10.0);
    std::uniform_real_distribution<double> ug(0.0, 1.0);

    int admissible = 0, violations = 0, trials = 0;
    while (admissible < 100 && trials < 500) {
      const int trial = trials++;
      const double alpha = ua(rng);
      const double gamma_d = 0.05 + ug(rng) * (0.8 * (2.0 - alpha) / 2.0 - 0.05);
      const double mu = umu(rng);
      const double beta_b = alpha - 1.0 + ur(rng);
      const double beta = ubeta(rng);
      const double load = uload(rng);

      auto base = CoefficientProfile::power_law(alpha, mu, beta_b, gamma_d, 0.0, beta);
      auto w = feller_weight(base);
      SpectralOptions sopts;
      sopts.n0 = 64;
      sopts.levels = 3;
      auto hardy = best_constants(base, w, sopts);
      auto rep = check_hypotheses(base, hardy);
      if (!rep.structure_ok()) continue;

      double lambda = 0.0;
      if (trial % 3 == 0) {
        lambda = 0.3 / hardy.c_hp_safe;
      } else if (trial % 3 == 1) {
        lambda = -0.4 * rep.epsilon0 /
                 (2.0 * hardy.c_hp_safe * (1.0 + 1.5 * rep.k_a + rep.k_d + rep.m));
      }
      auto prof = base.with_lambda(lambda);
      if (!check_hypotheses(prof, hardy).certificate_ready()) continue;
      ++admissible;

      auto mats = assemble(prof, w, build_mesh(128, prof));
      auto st = solve_steady(mats, load, lambda, beta);
      auto gauge = lambda_gauge(lambda, hardy, w.eta_min);
      const double cl2 = gauge.c_lambda * gauge.c_lambda;
      const double bound1 = load * load * cl2;
      const double bound2 = (hardy.c_hp_tilde_safe + w.eta_max) * load * load * cl2 * cl2;
      if (st.triple_norm_sq > bound1 * (1.0 + 1e-8) + 1e-12) ++violations;
      if (st.weighted_l2_sq > bound2 * (1.0 + 1e-8) + 1e-12) ++violations;
    }
    const bool pass = admissible == 100 && violations == 0;
    return {pass, fmt("%d admissible tuples from %d draws, %d violations", admissible,
                      trials, violations)};
  });

  // ---- 5: certified decay bound with margin, plus tamper control ----------
  run_criterion(5, "certified decay bound holds with unit margin; tampering fails",
                [&]() -> Verdict {
    if (matrix.size() != 12) return {false, "matrix runs unavailable"};
    double min_margin = std::numeric_limits<double>::infinity();
    std::string tight = "none";
    for (const auto& run : matrix) {
      auto check = verify_decay_bound(run.trace, run.cert);
      if (!check.holds)
        return {false, fmt("bound violated on %s at t = %.3f", run.label.c_str(),
                           check.first_violation_time.value_or(-1.0))};
      if (check.margin < min_margin) {
        min_margin = check.margin;
        tight = run.label;
      }
    }

    // negative control: a hundredfold-faster claimed decay must be refuted
    auto control = CoefficientProfile::power_law(0.5, 0.0, 1.0, 0.25, 0.0, 0.0);
    auto w = feller_weight(control);
    SpectralOptions sopts;
    sopts.n0 = 64;
    sopts.levels = 4;
    auto hardy = best_constants(control, w, sopts);
    auto rep = check_hypotheses(control, hardy);
    auto cert = compute_certificate(control, rep, w, hardy);
    SimOptions opts;
    opts.t_final = std::max(3.0 * cert.m_script, 20.0);
    opts.dt = 0.01;
    opts.init = InitialSpec::preset_cubic();
    auto mats = assemble(control, w, build_mesh(128, control));
    auto trace = simulate(control, mats, rep, opts).trace;
    if (!verify_decay_bound(trace, cert).holds)
      return {false, "control certificate unexpectedly violated"};
    auto tampered = cert;
    tampered.m_script /= 100.0;
    auto refuted = verify_decay_bound(trace, tampered);
    const bool pass = min_margin >= 1.0 && !refuted.holds &&
                      refuted.first_violation_time.has_value();
    return {pass, fmt("min margin %.3f (%s); tampered decay time refuted at t = %.3f",
                      min_margin, tight.c_str(),
                      refuted.first_violation_time.value_or(-1.0))};
  });

  // ---- 6: multiplier identity refinement ladder ---------------------------
  run_criterion(6, "multiplier identities refine to residual <= 1e-2", [&]() -> Verdict {
    const auto t0 = std::chrono::steady_clock::now();
    const double lambda = 0.05 / wd.hardy.c_hp_safe;
    auto profile = wd.base.with_lambda(lambda);
    auto report = check_hypotheses(profile, wd.hardy);
    const double s = 0.5, t_end = 3.0;
    const std::vector<std::pair<int, double>> ladder = {{128, 2e-3}, {256, 1e-3}, {512, 5e-4}};
    std::vector<double> rm, rb;
    for (const auto& [n, dt] : ladder) {
      auto mats = assemble(profile, wd.weights, build_mesh(n, profile));
      SimOptions opts;
      opts.dt = dt;
      opts.t_final = t_end;
      opts.stride = 1;
      opts.init = InitialSpec::preset_cubic();
      opts.store_trajectory = true;
      opts.store_from = s;
      opts.store_to = t_end;
      auto res = simulate(profile, mats, report, opts);
      rm.push_back(multiplier_residual(*res.trajectory, profile, s, t_end).residual);
      rb.push_back(bt_identity_residual(*res.trajectory, profile, s, t_end).residual);
    }
    const double dt_wall = seconds_since(t0);
    const bool shrinking = rm[1] < rm[0] && rm[2] < rm[1] && rb[1] < rb[0] && rb[2] < rb[1];
    const bool pass = shrinking && rm[2] <= 1e-2 && rb[2] <= 1e-2 && dt_wall <= 120.0;
    return {pass, fmt("space-time %.2e -> %.2e -> %.2e, boundary-split %.2e -> %.2e -> %.2e, "
                      "%.1f s",
                      rm[0], rm[1], rm[2], rb[0], rb[1], rb[2], dt_wall)};
  });

  // ---- 7: trace-estimate slack on the matrix, forced violation caught -----
  run_criterion(7, "trace estimates hold on every admissible run; forced violation caught",
                [&]() -> Verdict {
    if (matrix.size() != 12 || reference_trace.times.empty())
      return {false, "matrix or reference run unavailable"};
    double min_slack = std::numeric_limits<double>::infinity();
    std::string tight = "none";
    for (const auto& run : matrix) {
      const auto& times = run.trace.times;
      const double target = times.back() / 10.0;
      const auto it = std::lower_bound(times.begin(), times.end(), target);
      const double s = *it;
      auto rep = trace_bound_check(run.trace, run.cert, s, times.back(), run.cert.delta);
      if (!rep.all_hold())
        return {false,
                fmt("trace estimate violated on %s: trace-by-energy %.4e <= %.4e (%s), "
                    "energy-by-trace %.4e <= %.4e (%s)",
                    run.label.c_str(), rep.trace_by_energy.lhs, rep.trace_by_energy.rhs,
                    rep.trace_by_energy.holds ? "ok" : "BROKEN", rep.energy_by_trace.lhs,
                    rep.energy_by_trace.rhs, rep.energy_by_trace.holds ? "ok" : "BROKEN")};
      const double slack = std::min(rep.trace_by_energy.slack, rep.energy_by_trace.slack);
      if (slack < min_slack) {
        min_slack = slack;
        tight = run.label;
      }
    }

    auto control =
        trace_bound_check(reference_trace, reference_cert, 1.0, 10.0, reference_cert.delta);
    const bool caught = control.energy_by_trace.rhs / 100.0 < control.energy_by_trace.lhs;
    const bool pass = min_slack >= 0.0 && caught;
    return {pass, fmt("min slack %.3e (%s); hundredfold-shrunk budget %s", min_slack,
                      tight.c_str(), caught ? "violated as forced" : "NOT caught")};
  });

  // ---- 8: time-integration order and undamped conservation ----------------
  run_criterion(8, "second-order time accuracy and undamped conservation", [&]() -> Verdict {
    auto profile = wd.base;
    auto report = check_hypotheses(profile, wd.hardy);
    auto mats = assemble(profile, wd.weights, build_mesh(32, profile));
    auto energy_at = [&](int steps) {
      SimOptions opts;
      opts.dt = 1.0 / steps;
      opts.t_final = 1.0;
      opts.stride = 1 << 20;
      opts.init = InitialSpec::preset_cubic();
      return simulate(profile, mats, report, opts).trace.energy.back();
    };
    const double e50 = energy_at(50), e100 = energy_at(100), e200 = energy_at(200),
                 e400 = energy_at(400);
    const double p1 = std::log2(std::abs(e50 - e100) / std::abs(e100 - e200));
    const double p2 = std::log2(std::abs(e100 - e200) / std::abs(e200 - e400));

    auto conserved = CoefficientProfile::power_law(0.5, 0.1, 1.0, 0.25, 0.0, 0.0);
    auto crep = check_hypotheses(conserved, wd.hardy);
    SimOptions copts;
    copts.dt = 1e-3;
    copts.t_final = 1.0;
    copts.undamped = true;
    copts.init = InitialSpec::preset_cubic();
    auto trace = simulate(conserved, mats, crep, copts).trace;
    double drift = 0.0;
    for (double e : trace.energy) drift = std::max(drift, std::abs(e - trace.e0));
    const double rel_drift = drift / trace.e0;

    const bool pass = p1 >= 1.9 && p2 >= 1.9 && rel_drift <= 1e-12;
    return {pass, fmt("observed orders %.2f, %.2f; undamped relative drift %.2e over %lld steps",
                      p1, p2, rel_drift, trace.steps)};
  });

  // ---- 9: refusal exit codes name the violated inequality -----------------
  run_criterion(9, "refusals exit with dedicated codes naming the inequality",
                [&]() -> Verdict {
    testutil::TempDir dir("acceptance_cli");
    const std::vector<std::string> fast = {"-O", "spectral.n0=32", "-O", "spectral.levels=2",
                                           "-O", "mesh.n=64", "-o", dir.str("")};
    auto with = [&](std::vector<std::string> args) {
      args.insert(args.end(), fast.begin(), fast.end());
      return args;
    };
    auto hot = invoke_cli(with({"certify", "-O", "lambda.rel=2"}));
    auto broken = invoke_cli(with({"certify", "-O", "a.alpha=1.2", "-O", "d.gamma=0.5"}));
    const bool lambda_ok = hot.code == 3 && hot.err.find("1/C_HP") != std::string::npos;
    const bool structure_ok =
        broken.code == 2 && broken.err.find("K_a + 2 K_d") != std::string::npos;
    return {lambda_ok && structure_ok,
            fmt("inadmissible coupling -> exit %d, structural violation -> exit %d", hot.code,
                broken.code)};
  });

  if (g_failed == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d of 9 criteria FAILED\n", g_failed);
  return 1;
}
