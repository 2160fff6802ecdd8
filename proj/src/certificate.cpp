#include "degwave/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "degwave/errors.hpp"

namespace degwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// 1 + 3 K_a / 2 + K_d + M, the factor multiplying the spectral shift in
/// every lambda < 0 correction
double shift_factor(const ProfileScalars& s) {
  return 1.0 + 1.5 * s.k_a + s.k_d + s.m;
}

/// 2 lambda C_HP (1 + 3 K_a/2 + K_d + M); zero for lambda >= 0, negative
/// otherwise
double negative_shift(const ProfileScalars& s) {
  if (s.lambda >= 0.0) return 0.0;
  return 2.0 * s.lambda * s.c_hp * shift_factor(s);
}

double denominator_at(const ProfileScalars& s, double c2, double c4, double delta) {
  return s.epsilon0 - c2 * c4 * delta + negative_shift(s);
}

std::string join_diagnostics(const DegeneracyReport& report, const char* lead) {
  std::string what = lead;
  for (const auto& d : report.diagnostics) what += "; " + d;
  return what;
}

}  // namespace

double theta(const ProfileScalars& s, const LambdaGauge& gauge) {
  const double obs = 1.0 / s.a1 + s.k_a * s.c_hp_tilde / (4.0 * s.eta_min);
  return 2.0 / gauge.one_eps * std::max(obs, 1.0 + s.k_a / 4.0);
}

double c3_at(const ProfileScalars& s, const LambdaGauge& gauge, double delta) {
  const double cl2 = gauge.c_lambda * gauge.c_lambda;
  const double cl4 = cl2 * cl2;
  return 2.0 / gauge.one_eps +
         2.0 * s.c_hp_tilde * cl2 / (gauge.one_eps * gauge.one_eps * s.eta_min * s.eta_min) +
         1.0 / (2.0 * delta) + (s.c_hp_tilde + s.eta_max) * cl4 / (2.0 * delta);
}

double m_script_at(const DecayCertificate& cert, double delta) {
  if (!(delta > 0.0) || !(delta < cert.delta0))
    throw UsageError("delta must lie in (0, delta_0)");
  const double c3 = c3_at(cert.scalars, cert.gauge, delta);
  const double denom = denominator_at(cert.scalars, cert.c2, cert.c4, delta);
  return (cert.c1 + cert.c2 * c3) / denom;
}

DecayCertificate compute_certificate(const CoefficientProfile& profile,
                                     const DegeneracyReport& report, const WeightPair& weights,
                                     const HardyConstants& hardy, const CertificateOptions& opts) {
  if (!report.structure_ok())
    throw HypothesisError(join_diagnostics(report, "coefficient hypotheses fail"));
  if (!report.lambda_ok())
    throw InadmissibleLambdaError(join_diagnostics(report, "lambda outside the admissible range"));

  DecayCertificate cert;
  ProfileScalars& s = cert.scalars;
  s.k_a = report.k_a;
  s.k_d = report.k_d;
  s.m = report.m;
  s.epsilon0 = report.epsilon0;
  s.a1 = profile.a(1.0);
  s.d1 = profile.d(1.0);
  s.eta1 = weights.eta_at_1;
  s.sigma1 = weights.sigma_at_1;
  s.eta_min = weights.eta_min;
  s.eta_max = weights.eta_max;
  s.lambda = profile.lambda();
  s.beta = profile.beta_damp();
  s.c_hp = hardy.c_hp_safe > 0.0 ? hardy.c_hp_safe : hardy.c_hp;
  s.c_hp_tilde = hardy.c_hp_tilde_safe > 0.0 ? hardy.c_hp_tilde_safe : hardy.c_hp_tilde;

  cert.gauge = lambda_gauge(s.lambda, hardy, s.eta_min);

  cert.theta = theta(s, cert.gauge);
  cert.c1 = 2.0 * cert.theta + 1.0 / s.sigma1 + 1.0 / s.eta1 + s.beta / s.eta1 + s.k_a / 4.0;
  cert.c2 = s.beta * s.beta / s.eta1 + s.k_a * s.beta / 2.0 + s.beta / s.eta1 + s.k_a / 4.0 +
            s.beta * s.epsilon0 / 2.0;
  if (s.lambda >= 0.0) cert.c2 += s.lambda / (s.sigma1 * s.d1);
  const double cl2 = cert.gauge.c_lambda * cert.gauge.c_lambda;
  cert.c4 = (1.0 + cl2 / (cert.gauge.one_eps * s.eta_min * s.eta_min)) / cert.gauge.one_eps;

  cert.delta0 = (s.epsilon0 + negative_shift(s)) / (cert.c2 * cert.c4);
  if (!(cert.delta0 > 0.0) || !std::isfinite(cert.delta0))
    throw InadmissibleLambdaError("splitting range is empty: delta_0 = " +
                                  std::to_string(cert.delta0) + " <= 0");

  cert.delta = cert.delta0 / 2.0;
  if (opts.optimize_delta) {
    double best = kInf, best_delta = cert.delta;
    for (int j = 1; j <= 64; ++j) {
      const double d = cert.delta0 * static_cast<double>(j) / 65.0;
      const double c3 = c3_at(s, cert.gauge, d);
      const double m = (cert.c1 + cert.c2 * c3) / denominator_at(s, cert.c2, cert.c4, d);
      if (m < best) {
        best = m;
        best_delta = d;
      }
    }
    cert.delta = best_delta;
  }

  cert.c3 = c3_at(s, cert.gauge, cert.delta);
  const double denom = denominator_at(s, cert.c2, cert.c4, cert.delta);
  cert.m_script = (cert.c1 + cert.c2 * cert.c3) / denom;

  const double lambda_lower =
      s.c_hp > 0.0 ? -s.epsilon0 / (2.0 * s.c_hp * shift_factor(s)) : -kInf;
  cert.assumption_ledger = {
      {"K_a < 2", s.k_a, 2.0, s.k_a < 2.0},
      {"K_d < 2", s.k_d, 2.0, s.k_d < 2.0},
      {"K_a + 2 K_d <= 2", s.k_a + 2.0 * s.k_d, 2.0, s.k_a + 2.0 * s.k_d <= 2.0},
      {"epsilon_0 > 0", s.epsilon0, 0.0, s.epsilon0 > 0.0},
      {"lambda < 1/C_HP", s.lambda, 1.0 / s.c_hp, s.lambda < 1.0 / s.c_hp},
      {"lambda > -epsilon_0 / (2 C_HP (1 + 3 K_a/2 + K_d + M))", s.lambda, lambda_lower,
       s.lambda > lambda_lower},
      {"delta < delta_0", cert.delta, cert.delta0, cert.delta < cert.delta0},
      {"decay denominator > 0", denom, 0.0, denom > 0.0},
  };
  for (const auto& entry : cert.assumption_ledger) {
    if (!entry.ok)
      throw NumericalError("certificate assumption failed: " + entry.name +
                           " with lhs = " + std::to_string(entry.lhs) +
                           ", rhs = " + std::to_string(entry.rhs));
  }
  if (!std::isfinite(cert.m_script) || cert.m_script <= 0.0)
    throw NumericalError("certified decay time is not a positive finite number");
  return cert;
}

DecayCheck verify_decay_bound(const EnergyTrace& trace, const DecayCertificate& cert) {
  DecayCheck check;
  check.margin = kInf;
  const double m = cert.m_script;
  if (trace.times.empty() || trace.times.back() < m)
    throw UsageError("trace horizon T = " +
                     std::to_string(trace.times.empty() ? 0.0 : trace.times.back()) +
                     " ends before the certified decay time M = " + std::to_string(m) +
                     "; rerun with t_final >= " + std::to_string(m));
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const double t = trace.times[k];
    if (t < m) continue;
    const double bound = trace.e0 * std::exp(1.0 - t / m);
    const double e = trace.energy[k];
    ++check.samples_checked;
    if (e > bound * (1.0 + 1e-8)) {
      check.holds = false;
      if (!check.first_violation_time) check.first_violation_time = t;
    }
    check.margin = std::min(check.margin, e > 0.0 ? bound / e : kInf);
  }
  return check;
}

DecayFit fit_decay_rate(const EnergyTrace& trace, double t_start) {
  std::vector<double> ts, ls;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    if (trace.times[k] < t_start) continue;
    if (!(trace.energy[k] > 1e-300)) continue;
    ts.push_back(trace.times[k]);
    ls.push_back(std::log(trace.energy[k]));
  }
  if (ts.size() < 10)
    throw NumericalError("decay-rate fit needs at least 10 usable samples past t = " +
                         std::to_string(t_start) + ", got " + std::to_string(ts.size()));
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, ml = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k];
    ml += ls[k];
  }
  mt /= n;
  ml /= n;
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - mt) * (ts[k] - mt);
    stl += (ts[k] - mt) * (ls[k] - ml);
    sll += (ls[k] - ml) * (ls[k] - ml);
  }
  if (!(stt > 0.0)) throw NumericalError("decay-rate fit window has zero time spread");
  const double slope = stl / stt;
  DecayFit fit;
  fit.rate = -slope;
  fit.intercept = ml - slope * mt;
  fit.samples = static_cast<int>(ts.size());
  if (sll > 0.0) {
    double ssres = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double r = ls[k] - (fit.intercept + slope * ts[k]);
      ssres += r * r;
    }
    fit.r_squared = 1.0 - ssres / sll;
  } else {
    fit.r_squared = 1.0;
  }
  return fit;
}

}  // namespace degwave
