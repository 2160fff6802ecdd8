#pragma once

#include <optional>
#include <string>
#include <vector>

#include "degwave/coefficients.hpp"
#include "degwave/dynamics.hpp"
#include "degwave/hardy.hpp"
#include "degwave/spectral.hpp"

namespace degwave {

/// Profile-derived scalars the certificate formulas consume.  Hardy
/// constants enter on their safe (inflated) side.
struct ProfileScalars {
  double k_a = 0.0;
  double k_d = 0.0;
  double m = 0.0;
  double epsilon0 = 0.0;
  double a1 = 0.0;
  double d1 = 0.0;
  double eta1 = 0.0;
  double sigma1 = 0.0;
  double eta_min = 0.0;
  double eta_max = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  double c_hp = 0.0;
  double c_hp_tilde = 0.0;
};

struct LedgerEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

struct DecayCertificate {
  ProfileScalars scalars;
  LambdaGauge gauge;
  double theta = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;  ///< evaluated at the certified delta
  double c4 = 0.0;
  double delta0 = 0.0;
  double delta = 0.0;
  double m_script = 0.0;
  /// how the spectral shift enters the lambda < 0 corrections
  std::string lambda_hp_reading = "lambda * C_HP";
  std::vector<LedgerEntry> assumption_ledger;
};

struct CertificateOptions {
  /// take delta = delta_0/2 (false) or minimize the decay time over a
  /// 64-point delta grid (true)
  bool optimize_delta = false;
};

/// Boundary-observability weight
///   theta = (2/1_eps) max{ 1/a(1) + K_a C~_HP/(4 min eta), 1 + K_a/4 }.
double theta(const ProfileScalars& s, const LambdaGauge& gauge);

/// C_3 as a function of the splitting parameter delta.
double c3_at(const ProfileScalars& s, const LambdaGauge& gauge, double delta);

/// Certified decay time at a given delta in (0, delta_0); the other
/// constants are fixed by the profile.
double m_script_at(const DecayCertificate& cert, double delta);

DecayCertificate compute_certificate(const CoefficientProfile& profile,
                                     const DegeneracyReport& report, const WeightPair& weights,
                                     const HardyConstants& hardy,
                                     const CertificateOptions& opts = {});

struct DecayCheck {
  bool holds = true;
  double margin = 0.0;  ///< min over checked samples of bound/energy
  int samples_checked = 0;
  std::optional<double> first_violation_time;
};

/// Check E(t) <= E(0) exp(1 - t/M) for all trace samples with t >= M,
/// with relative slack 1e-8.  A trace ending before M cannot be checked and
/// raises a usage error naming the required horizon.
DecayCheck verify_decay_bound(const EnergyTrace& trace, const DecayCertificate& cert);

struct DecayFit {
  double rate = 0.0;       ///< fitted decay rate (minus the slope of ln E)
  double intercept = 0.0;  ///< fitted ln E at t = 0
  double r_squared = 0.0;
  int samples = 0;
};

/// Least-squares fit of ln E(t) on t >= t_start; samples at or below the
/// double-precision floor are excluded.  Needs at least 10 samples.
DecayFit fit_decay_rate(const EnergyTrace& trace, double t_start);

}  // namespace degwave
