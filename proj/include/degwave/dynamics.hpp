#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "degwave/assembly.hpp"
#include "degwave/coefficients.hpp"
#include "degwave/tridiag.hpp"

namespace degwave {

/// Nodal state (full vectors, node 0 included and pinned to zero).
struct State {
  std::vector<double> y;
  std::vector<double> v;
  double t = 0.0;
};

struct InitialSpec {
  /// cubic is x(1-x)^2: flat and pinned at x = 1, so it is compatible with
  /// the damped boundary condition for every beta (no startup layer)
  enum class Y0 { ramp, bump, cubic, custom };
  enum class Y1 { still, custom };
  Y0 y0_kind = Y0::ramp;
  Y1 y1_kind = Y1::still;
  std::vector<double> y0_custom;  ///< nodal, size n+1, y0[0] = 0
  std::vector<double> y1_custom;

  static InitialSpec preset_ramp() { return {}; }
  static InitialSpec preset_bump() { return {Y0::bump, Y1::still, {}, {}}; }
  static InitialSpec preset_cubic() { return {Y0::cubic, Y1::still, {}, {}}; }
};

State initial_state(const InitialSpec& spec, const Mesh& mesh);

/// Discrete energy  E = (v^T B v + y^T K y - lambda y^T S y + beta y_N^2)/2.
double energy(const State& state, const OperatorMatrices& matrices, double lambda,
              double beta_damp);

/// One implicit-midpoint step of
///   y' = v,   B v' = -(K - lambda S) y - beta y_N e_N - v_N e_N,
/// reduced to a single symmetric tridiagonal solve per step.  The scheme
/// satisfies the exact discrete dissipation identity
///   E_{n+1} - E_n = -dt (v_mid)_N^2.
class Stepper {
public:
  Stepper(const OperatorMatrices& matrices, double lambda, double beta_damp, double dt,
          bool damped = true);

  void advance(State& state);
  double dt() const { return dt_; }
  /// (v_mid)_N of the last advance
  double last_boundary_vmid() const { return last_vmid_n_; }

private:
  const OperatorMatrices& mats_;
  SymTridiag stiff_;  // K - lambda S + beta e_N e_N^T
  TridiagCholesky factor_;
  double dt_;
  bool damped_;
  double last_vmid_n_ = 0.0;
  std::vector<double> rhs_, bv_, ky_;
};

/// Convenience single step (builds a Stepper internally).
State step(const State& state, double dt, const OperatorMatrices& matrices, double lambda,
           double beta_damp);

/// First-order explicit Euler reference stepping; deliberately breaks the
/// discrete dissipation identity at O(dt) for negative controls.
State step_explicit_euler(const State& state, double dt, const OperatorMatrices& matrices,
                          double lambda, double beta_damp);

/// Strided energy/boundary trace of a run.  diss_residual[k] holds the
/// largest raw per-step defect |E_{n+1} - E_n + dt (v_mid)_N^2| among the
/// steps recorded into row k.
struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> boundary_y;
  std::vector<double> boundary_v;
  std::vector<double> diss_residual;
  double e0 = 0.0;
  double dt = 0.0;
  long long steps = 0;
  /// largest single-step energy increase over the whole run (raw, <= 0 when
  /// the trace is monotone)
  double max_energy_jump = 0.0;
};

/// Dense nodal snapshots (stride 1 in the storage window).
struct Trajectory {
  Mesh mesh;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> v;
};

struct SimOptions {
  double dt = 1e-3;
  double t_final = 20.0;
  int stride = 1;
  InitialSpec init;
  bool undamped = false;  ///< drop the boundary damping row (conservation control)
  bool store_trajectory = false;
  double store_from = 0.0;
  double store_to = std::numeric_limits<double>::infinity();
};

struct SimResult {
  EnergyTrace trace;
  std::optional<Trajectory> trajectory;
};

/// Run the damped flow.  Requires a well-posed profile (Hyp.1-2 and
/// K_a + 2 K_d <= 2); certificate-level refusals do not block simulation.
SimResult simulate(const CoefficientProfile& profile, const OperatorMatrices& matrices,
                   const DegeneracyReport& report, const SimOptions& opts);

/// max_n |E_{n+1} - E_n + dt (v_mid)_N^2| / max(E_0, 1)
double dissipation_residual(const EnergyTrace& trace);

}  // namespace degwave
