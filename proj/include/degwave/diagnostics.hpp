#pragma once

#include <string>
#include <vector>

#include "degwave/certificate.hpp"
#include "degwave/coefficients.hpp"
#include "degwave/dynamics.hpp"

namespace degwave {

/// Two-sided evaluation of an integral identity on a simulated solution.
/// residual = |lhs - rhs| / max(|lhs|, |rhs|, 1).  refinement_trend is
/// filled by ladder drivers, not by the single-run evaluators.
struct IdentityReport {
  std::string identity_name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  std::vector<double> refinement_trend;
  std::string notes;
};

/// Space-time multiplier identity: the four distributed integrals with
/// weights x eta b/a, (1 - x(a'-b)/a)/sigma, eta, lambda(...)/(sigma d)
/// against the x y_x y_t/sigma time-boundary bracket and the boundary
/// traces at x = 1.  Both sides integrated over [s, t_end].
IdentityReport multiplier_residual(const Trajectory& trajectory, const CoefficientProfile& profile,
                                   double s, double t_end);

/// Boundary-term splitting: the bracketed -2x y_x y_t/sigma + (K_a/2) y y_t/sigma
/// terms plus the x = 1 traces against the three distributed integrals with
/// their 1 +- ... +- K_a/2 weights.
IdentityReport bt_identity_residual(const Trajectory& trajectory, const CoefficientProfile& profile,
                                    double s, double t_end);

struct TraceBoundEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  ///< rhs - lhs
  bool holds = false;
};

/// Verdicts for the two proved trace estimates on a recorded run.
struct TraceBoundReport {
  /// int y(t,1)^2 <= C3 E(s) + delta C4 int E
  TraceBoundEntry trace_by_energy;
  /// (eps0/2) int (2E - beta y(t,1)^2) <= C1 E(s) + (C2 - beta eps0/2) int y(t,1)^2
  /// (plus the spectral-shift term when lambda < 0)
  TraceBoundEntry energy_by_trace;
  double s = 0.0;
  double t_end = 0.0;
  double delta = 0.0;

  bool all_hold() const { return trace_by_energy.holds && energy_by_trace.holds; }
};

/// Evaluate both trace estimates from an energy trace and a certificate.
/// delta may differ from the certified one (C3 is re-evaluated at it).
TraceBoundReport trace_bound_check(const EnergyTrace& trace, const DecayCertificate& cert, double s,
                                   double t_end, double delta);

}  // namespace degwave
