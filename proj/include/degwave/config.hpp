#pragma once

#include <optional>
#include <string>

#include "degwave/coefficients.hpp"

namespace degwave {

/// Flat run configuration filled from `key = value` files plus overrides.
struct RunConfig {
  // coefficient profile
  std::string profile_kind = "power_law";  // "power_law" | "tabulated"
  PowerLawParams power{0.5, 0.1, 1.0, 0.25};
  std::string tabulated_path;
  double lambda = 0.0;
  /// lambda expressed as a multiple of 1/C_HP, resolved once the Hardy
  /// constants are known; takes precedence over `lambda`
  std::optional<double> lambda_rel;
  double beta_damp = 1.0;

  // discretization
  int mesh_n = 256;
  std::optional<double> mesh_q;  ///< default: grading chosen from K_a
  int quad_points = 4;

  // time stepping
  double dt = 1e-3;
  double t_final = 20.0;
  int stride = 1;
  std::string init_preset = "ramp";  // "ramp" | "bump"

  // spectral ladder
  int spectral_n0 = 64;
  int spectral_levels = 4;

  // identity diagnostics window
  double diag_s = 0.5;
  double diag_t = 3.0;

  // parameter sweep
  std::string sweep_parameter;
  double sweep_from = 0.0;
  double sweep_to = 0.0;
  int sweep_count = 0;

  unsigned long long seed = 20240901ULL;
  std::string out_dir;  ///< empty: --out flag, DEGWAVE_OUT, or "." decide
};

/// Parse a plain `key = value` config file ('#' comments, blank lines ok).
/// Unknown keys are rejected with the offending line number.
RunConfig parse_config_file(const std::string& path);

/// Apply one `key=value` override to an existing config.
void apply_override(RunConfig& config, const std::string& assignment);

/// Range/finiteness checks shared by every entry point.
void validate(const RunConfig& config);

/// Instantiate the coefficient profile described by the config.  lambda_rel
/// is left unresolved (lambda 0) until the Hardy constants exist.
CoefficientProfile make_profile(const RunConfig& config);

}  // namespace degwave
