#include <cmath>
#include <string>
#include <vector>

#include "degwave/certificate.hpp"
#include "degwave/coefficients.hpp"
#include "degwave/diagnostics.hpp"
#include "degwave/dynamics.hpp"
#include "degwave/errors.hpp"
#include "degwave/hardy.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace degwave;

namespace {

Trajectory zero_trajectory(int n, double dt, int rows) {
  Trajectory traj;
  traj.mesh = build_mesh(n, 2.0);
  traj.dt = dt;
  for (int k = 0; k < rows; ++k) {
    traj.times.push_back(dt * k);
    traj.y.emplace_back(n + 1, 0.0);
    traj.v.emplace_back(n + 1, 0.0);
  }
  return traj;
}

/// simulate on [0, t_end] and keep dense snapshots of [s, t_end]
SimResult run_with_window(const CoefficientProfile& p, int n, double dt, double s, double t_end) {
  auto a = testutil::assembled(p, n);
  auto hardy = HardyConstants::exact(2.0, 1.0);
  auto rep = check_hypotheses(p, hardy);
  SimOptions opts;
  opts.dt = dt;
  opts.t_final = t_end;
  opts.stride = 1;
  opts.init = InitialSpec::preset_cubic();
  opts.store_trajectory = true;
  opts.store_from = s;
  opts.store_to = t_end;
  return simulate(p, a.matrices, rep, opts);
}

DecayCertificate certify(const CoefficientProfile& p) {
  auto w = feller_weight(p);
  auto hardy = HardyConstants::exact(2.0, 1.0);
  auto rep = check_hypotheses(p, hardy);
  return compute_certificate(p, rep, w, hardy);
}

}  // namespace

TEST_CASE("zero solutions satisfy both identities exactly") {
  auto traj = zero_trajectory(16, 0.01, 11);
  auto p = testutil::reference_profile();

  auto mult = multiplier_residual(traj, p, 0.0, 0.1);
  CHECK(mult.lhs == 0.0);
  CHECK(mult.rhs == 0.0);
  CHECK(mult.residual == 0.0);

  auto bt = bt_identity_residual(traj, p, 0.0, 0.1);
  CHECK(bt.lhs == 0.0);
  CHECK(bt.rhs == 0.0);
  CHECK(bt.residual == 0.0);
}

TEST_CASE("zero traces satisfy both trace bounds with zero slack") {
  auto cert = certify(testutil::driftfree_profile(0.5, 0.25, 0.0, 1.0));
  EnergyTrace trace;
  trace.dt = 0.1;
  for (int k = 0; k <= 100; ++k) {
    trace.times.push_back(0.1 * k);
    trace.energy.push_back(0.0);
    trace.boundary_y.push_back(0.0);
    trace.boundary_v.push_back(0.0);
    trace.diss_residual.push_back(0.0);
  }
  auto rep = trace_bound_check(trace, cert, 1.0, 10.0, cert.delta);
  CHECK(rep.all_hold());
  CHECK(rep.trace_by_energy.lhs == 0.0);
  CHECK(rep.trace_by_energy.rhs == 0.0);
  CHECK(rep.trace_by_energy.slack == 0.0);
  CHECK(rep.energy_by_trace.lhs == 0.0);
  CHECK(rep.energy_by_trace.rhs == 0.0);
  CHECK(rep.energy_by_trace.slack == 0.0);
}

TEST_CASE("identity residuals shrink under refinement on the drifted profile") {
  auto p = testutil::reference_profile(0.1, 1.0);
  const double s = 0.5, t_end = 2.0;
  std::vector<double> mult_res, bt_res;
  const int ns[3] = {64, 128, 256};
  const double dts[3] = {4e-3, 2e-3, 1e-3};
  for (int l = 0; l < 3; ++l) {
    auto res = run_with_window(p, ns[l], dts[l], s, t_end);
    REQUIRE(res.trajectory.has_value());
    mult_res.push_back(multiplier_residual(*res.trajectory, p, s, t_end).residual);
    bt_res.push_back(bt_identity_residual(*res.trajectory, p, s, t_end).residual);
  }
  // trapezoid-in-time dominates: halving dt should halve the residual;
  // 0.75 leaves room for the spatial contribution
  CHECK(mult_res[1] < 0.75 * mult_res[0]);
  CHECK(mult_res[2] < 0.75 * mult_res[1]);
  CHECK(mult_res[2] < 1e-3);
  CHECK(bt_res[1] < 0.75 * bt_res[0]);
  CHECK(bt_res[2] < 0.75 * bt_res[1]);
  CHECK(bt_res[2] < 1e-3);
}

TEST_CASE("the drift-free multiplier identity still refines") {
  auto p = testutil::driftfree_profile(0.5, 0.25, 0.0, 1.0);
  const double s = 0.5, t_end = 2.0;
  auto coarse = run_with_window(p, 64, 4e-3, s, t_end);
  auto fine = run_with_window(p, 128, 2e-3, s, t_end);
  const double r0 = multiplier_residual(*coarse.trajectory, p, s, t_end).residual;
  const double r1 = multiplier_residual(*fine.trajectory, p, s, t_end).residual;
  CHECK(r1 < 0.75 * r0);
}

TEST_CASE("the boundary-term identity survives the vanishing-degeneracy limit") {
  auto p = testutil::driftfree_profile(0.01, 0.25, 0.0, 1.0);
  const double s = 0.5, t_end = 2.0;
  auto coarse = run_with_window(p, 64, 4e-3, s, t_end);
  auto fine = run_with_window(p, 128, 2e-3, s, t_end);
  const double r0 = bt_identity_residual(*coarse.trajectory, p, s, t_end).residual;
  const double r1 = bt_identity_residual(*fine.trajectory, p, s, t_end).residual;
  CHECK(r1 < 0.75 * r0);
}

TEST_CASE("identity diagnostics refuse tabulated profiles") {
  auto tab = CoefficientProfile::tabulated([](double x) { return x; }, [](double) { return 0.0; },
                                           [](double x) { return std::pow(x, 0.25); }, 0.0, 1.0);
  auto traj = zero_trajectory(16, 0.01, 11);
  CHECK_THROWS_AS(multiplier_residual(traj, tab, 0.0, 0.1), UsageError);
  CHECK_THROWS_AS(bt_identity_residual(traj, tab, 0.0, 0.1), UsageError);
}

TEST_CASE("identity windows must align with densely stored samples") {
  auto p = testutil::reference_profile();
  auto traj = zero_trajectory(16, 0.01, 11);

  CHECK_THROWS_AS(multiplier_residual(traj, p, 0.0317, 0.1), UsageError);
  CHECK_THROWS_AS(multiplier_residual(traj, p, 0.1, 0.1), UsageError);
  CHECK_THROWS_AS(multiplier_residual(traj, p, 0.0, 0.01), UsageError);

  auto gapped = traj;
  for (std::size_t k = 0; k < gapped.times.size(); ++k) gapped.times[k] = 0.02 * k;
  CHECK_THROWS_AS(multiplier_residual(gapped, p, 0.0, 0.2), UsageError);
}

TEST_CASE("the multiplier report flags its boundary-integration window") {
  auto traj = zero_trajectory(16, 0.01, 11);
  auto rep = multiplier_residual(traj, testutil::reference_profile(), 0.0, 0.1);
  CHECK(rep.notes.find("[s, t_end]") != std::string::npos);
}

TEST_CASE("trace bounds hold on a simulated reference run and tampering is caught") {
  auto p = testutil::reference_profile(0.025, 1.0);
  auto a = testutil::assembled(p, 128);
  auto hardy = HardyConstants::exact(2.0, 1.0);
  auto rep = check_hypotheses(p, hardy);
  auto cert = compute_certificate(p, rep, a.weights, hardy);

  SimOptions opts;
  opts.dt = 1e-3;
  opts.t_final = 10.0;
  opts.stride = 10;
  opts.init = InitialSpec::preset_cubic();
  auto res = simulate(p, a.matrices, rep, opts);

  auto check = trace_bound_check(res.trace, cert, 1.0, 10.0, cert.delta);
  CHECK(check.all_hold());
  CHECK(check.trace_by_energy.slack > 0.0);
  CHECK(check.energy_by_trace.slack > 0.0);
  CHECK(check.delta == cert.delta);

  // dividing the proved right-hand sides by 100 must flip a verdict; the
  // energy-by-trace estimate is the sharper of the two on this run (observed
  // conservatism ~16x against ~280x for the other direction)
  CHECK(check.energy_by_trace.rhs / 100.0 < check.energy_by_trace.lhs);
}

TEST_CASE("trace-bound windows are validated") {
  auto cert = certify(testutil::driftfree_profile(0.5, 0.25, 0.0, 1.0));
  EnergyTrace trace;
  trace.dt = 0.1;
  for (int k = 0; k <= 100; ++k) {
    trace.times.push_back(0.1 * k);
    trace.energy.push_back(1.0);
    trace.boundary_y.push_back(0.0);
    trace.boundary_v.push_back(0.0);
    trace.diss_residual.push_back(0.0);
  }
  CHECK_THROWS_AS(trace_bound_check(trace, cert, 1.0, 10.0, 0.0), UsageError);
  CHECK_THROWS_AS(trace_bound_check(trace, cert, 1.0, 10.0, -1.0), UsageError);
  CHECK_THROWS_AS(trace_bound_check(trace, cert, 1.0, 10.0, cert.delta0), UsageError);
  CHECK_THROWS_AS(trace_bound_check(trace, cert, 5.0, 5.0, cert.delta), UsageError);
  CHECK_THROWS_AS(trace_bound_check(trace, cert, 1.0234, 10.0, cert.delta), UsageError);
}
