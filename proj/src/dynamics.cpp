#include "degwave/dynamics.hpp"

#include <cmath>
#include <string>

#include "degwave/errors.hpp"

namespace degwave {

namespace {

std::vector<double> reduced(const std::vector<double>& full) {
  return std::vector<double>(full.begin() + 1, full.end());
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw UsageError("time step must be positive");
}

SymTridiag damped_stiffness(const OperatorMatrices& matrices, double lambda, double beta_damp) {
  SymTridiag stiff =
      lambda != 0.0 ? matrices.k_mat.plus_scaled(matrices.s_mat, -lambda) : matrices.k_mat;
  if (beta_damp != 0.0) stiff.diag(stiff.size() - 1) += beta_damp;
  return stiff;
}

// System of the midpoint velocity: (B + dt^2/4 K~ + dt/2 e_N e_N^T) v_mid =
// B v_n - dt/2 K~ y_n.  Solving for v_mid keeps every state update free of
// divisions by dt, so a vanishing step perturbs the state by O(dt), not
// O(roundoff/dt).
SymTridiag midpoint_system(const OperatorMatrices& matrices, const SymTridiag& stiff, double dt,
                           bool damped) {
  SymTridiag sys = matrices.b_mat.plus_scaled(stiff, 0.25 * dt * dt);
  if (damped) sys.diag(sys.size() - 1) += 0.5 * dt;
  return sys;
}

}  // namespace

State initial_state(const InitialSpec& spec, const Mesh& mesh) {
  const std::size_t m = mesh.nodes.size();
  State s;
  s.y.assign(m, 0.0);
  s.v.assign(m, 0.0);
  switch (spec.y0_kind) {
    case InitialSpec::Y0::ramp:
      for (std::size_t i = 0; i < m; ++i) s.y[i] = mesh.nodes[i];
      break;
    case InitialSpec::Y0::bump:
      for (std::size_t i = 0; i < m; ++i) {
        const double x = mesh.nodes[i];
        s.y[i] = 4.0 * x * (1.0 - x);
      }
      break;
    case InitialSpec::Y0::cubic:
      for (std::size_t i = 0; i < m; ++i) {
        const double x = mesh.nodes[i];
        s.y[i] = x * (1.0 - x) * (1.0 - x);
      }
      break;
    case InitialSpec::Y0::custom:
      if (spec.y0_custom.size() != m)
        throw UsageError("custom y0 has " + std::to_string(spec.y0_custom.size()) +
                         " entries, mesh has " + std::to_string(m) + " nodes");
      if (spec.y0_custom.front() != 0.0)
        throw UsageError("initial displacement y(0) = " + std::to_string(spec.y0_custom.front()) +
                         " violates the pinned boundary y(0) = 0");
      s.y = spec.y0_custom;
      break;
  }
  if (spec.y1_kind == InitialSpec::Y1::custom) {
    if (spec.y1_custom.size() != m)
      throw UsageError("custom y1 has " + std::to_string(spec.y1_custom.size()) +
                       " entries, mesh has " + std::to_string(m) + " nodes");
    if (spec.y1_custom.front() != 0.0)
      throw UsageError("initial velocity v(0) = " + std::to_string(spec.y1_custom.front()) +
                       " violates the pinned boundary y(0) = 0");
    s.v = spec.y1_custom;
  }
  s.t = 0.0;
  return s;
}

double energy(const State& state, const OperatorMatrices& matrices, double lambda,
              double beta_damp) {
  const std::vector<double> y = reduced(state.y);
  const std::vector<double> v = reduced(state.v);
  double q = matrices.b_mat.quad_form(v) + matrices.k_mat.quad_form(y);
  if (lambda != 0.0) q -= lambda * matrices.s_mat.quad_form(y);
  if (beta_damp != 0.0) q += beta_damp * y.back() * y.back();
  return 0.5 * q;
}

Stepper::Stepper(const OperatorMatrices& matrices, double lambda, double beta_damp, double dt,
                 bool damped)
    : mats_(matrices),
      stiff_((check_dt(dt), damped_stiffness(matrices, lambda, beta_damp))),
      factor_(midpoint_system(matrices, stiff_, dt, damped)),
      dt_(dt),
      damped_(damped) {
  const int n = stiff_.size();
  rhs_.assign(n, 0.0);
  bv_.assign(n, 0.0);
  ky_.assign(n, 0.0);
}

void Stepper::advance(State& state) {
  const int n = stiff_.size();
  std::vector<double> y = reduced(state.y);
  std::vector<double> v = reduced(state.v);
  mats_.b_mat.multiply(v, bv_);
  stiff_.multiply(y, ky_);
  for (int i = 0; i < n; ++i) rhs_[i] = bv_[i] - 0.5 * dt_ * ky_[i];
  factor_.solve(rhs_);  // rhs_ now holds v_mid
  for (int i = 0; i < n; ++i) {
    state.y[i + 1] = y[i] + dt_ * rhs_[i];
    state.v[i + 1] = 2.0 * rhs_[i] - v[i];
  }
  last_vmid_n_ = rhs_[n - 1];
  state.t += dt_;
}

State step(const State& state, double dt, const OperatorMatrices& matrices, double lambda,
           double beta_damp) {
  Stepper stepper(matrices, lambda, beta_damp, dt);
  State next = state;
  stepper.advance(next);
  return next;
}

State step_explicit_euler(const State& state, double dt, const OperatorMatrices& matrices,
                          double lambda, double beta_damp) {
  check_dt(dt);
  SymTridiag stiff = damped_stiffness(matrices, lambda, beta_damp);
  const int n = stiff.size();
  std::vector<double> y = reduced(state.y);
  std::vector<double> v = reduced(state.v);
  std::vector<double> f(n, 0.0);
  stiff.multiply(y, f);
  f[n - 1] += v[n - 1];
  TridiagCholesky mass(matrices.b_mat);
  mass.solve(f);  // f = B^{-1} ((K - lambda S + beta e e^T) y + v_N e_N)
  State next = state;
  for (int i = 0; i < n; ++i) {
    next.y[i + 1] = y[i] + dt * v[i];
    next.v[i + 1] = v[i] - dt * f[i];
  }
  next.t += dt;
  return next;
}

SimResult simulate(const CoefficientProfile& profile, const OperatorMatrices& matrices,
                   const DegeneracyReport& report, const SimOptions& opts) {
  if (!report.well_posed()) {
    std::string what = "profile is not well posed for the damped flow";
    for (const auto& d : report.diagnostics) what += "; " + d;
    throw HypothesisError(what);
  }
  if (opts.stride < 1) throw UsageError("trace stride must be >= 1");
  if (!(opts.t_final >= 0.0) || !std::isfinite(opts.t_final))
    throw UsageError("final time must be finite and nonnegative");
  check_dt(opts.dt);

  const double lambda = profile.lambda();
  const double beta = profile.beta_damp();
  State state = initial_state(opts.init, matrices.mesh);

  SimResult result;
  EnergyTrace& trace = result.trace;
  if (opts.store_trajectory) {
    result.trajectory.emplace();
    result.trajectory->mesh = matrices.mesh;
  }

  long long steps = 0;
  double dt = opts.dt;
  if (opts.t_final > 0.0) {
    steps = std::llround(opts.t_final / opts.dt);
    if (steps < 1) steps = 1;
    dt = opts.t_final / static_cast<double>(steps);
  }
  trace.dt = dt;
  trace.steps = steps;
  if (opts.store_trajectory) result.trajectory->dt = dt;

  double e_prev = energy(state, matrices, lambda, beta);
  trace.e0 = e_prev;
  trace.max_energy_jump = 0.0;

  auto store_snapshot = [&](const State& s) {
    if (!opts.store_trajectory) return;
    const double pad = 0.5 * dt;
    if (s.t < opts.store_from - pad || s.t > opts.store_to + pad) return;
    result.trajectory->times.push_back(s.t);
    result.trajectory->y.push_back(s.y);
    result.trajectory->v.push_back(s.v);
  };

  auto push_row = [&](double t, double e, double yb, double vb, double res) {
    trace.times.push_back(t);
    trace.energy.push_back(e);
    trace.boundary_y.push_back(yb);
    trace.boundary_v.push_back(vb);
    trace.diss_residual.push_back(res);
  };

  push_row(0.0, e_prev, state.y.back(), state.v.back(), 0.0);
  store_snapshot(state);
  if (steps == 0) return result;

  Stepper stepper(matrices, lambda, beta, dt, !opts.undamped);
  double window_res = 0.0;
  for (long long n = 1; n <= steps; ++n) {
    stepper.advance(state);
    state.t = dt * static_cast<double>(n);
    const double e = energy(state, matrices, lambda, beta);
    const double vmid = stepper.last_boundary_vmid();
    const double expected_drop = opts.undamped ? 0.0 : dt * vmid * vmid;
    window_res = std::max(window_res, std::abs(e - e_prev + expected_drop));
    trace.max_energy_jump = std::max(trace.max_energy_jump, e - e_prev);
    e_prev = e;
    store_snapshot(state);
    if (n % opts.stride == 0 || n == steps) {
      push_row(state.t, e, state.y.back(), state.v.back(), window_res);
      window_res = 0.0;
    }
  }
  return result;
}

double dissipation_residual(const EnergyTrace& trace) {
  double worst = 0.0;
  for (double r : trace.diss_residual) worst = std::max(worst, r);
  return worst / std::max(trace.e0, 1.0);
}

}  // namespace degwave
