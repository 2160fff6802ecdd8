#include "degwave/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "degwave/errors.hpp"

namespace degwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key " + key + ": cannot parse '" + value + "' as a real number");
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key " + key + ": cannot parse '" + value + "' as an integer");
  }
}

void assign(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "profile") {
    if (value != "power_law" && value != "tabulated")
      throw UsageError("config key profile: expected power_law or tabulated, got '" + value + "'");
    c.profile_kind = value;
  } else if (key == "a.alpha") {
    c.power.alpha = parse_real(key, value);
  } else if (key == "b.mu") {
    c.power.mu = parse_real(key, value);
  } else if (key == "b.beta") {
    c.power.beta_b = parse_real(key, value);
  } else if (key == "d.gamma") {
    c.power.gamma_d = parse_real(key, value);
  } else if (key == "tabulated.path") {
    c.tabulated_path = value;
  } else if (key == "lambda") {
    c.lambda = parse_real(key, value);
    c.lambda_rel.reset();
  } else if (key == "lambda.rel") {
    c.lambda_rel = parse_real(key, value);
  } else if (key == "beta_damp") {
    c.beta_damp = parse_real(key, value);
  } else if (key == "mesh.n") {
    c.mesh_n = static_cast<int>(parse_integer(key, value));
  } else if (key == "mesh.q") {
    c.mesh_q = parse_real(key, value);
  } else if (key == "quadrature.points") {
    c.quad_points = static_cast<int>(parse_integer(key, value));
  } else if (key == "time.dt") {
    c.dt = parse_real(key, value);
  } else if (key == "time.t_final") {
    c.t_final = parse_real(key, value);
  } else if (key == "time.stride") {
    c.stride = static_cast<int>(parse_integer(key, value));
  } else if (key == "init.preset") {
    if (value != "ramp" && value != "bump" && value != "cubic")
      throw UsageError("config key init.preset: expected ramp, bump or cubic, got '" + value +
                       "'");
    c.init_preset = value;
  } else if (key == "spectral.n0") {
    c.spectral_n0 = static_cast<int>(parse_integer(key, value));
  } else if (key == "spectral.levels") {
    c.spectral_levels = static_cast<int>(parse_integer(key, value));
  } else if (key == "diag.s") {
    c.diag_s = parse_real(key, value);
  } else if (key == "diag.t") {
    c.diag_t = parse_real(key, value);
  } else if (key == "sweep.parameter") {
    c.sweep_parameter = value;
  } else if (key == "sweep.from") {
    c.sweep_from = parse_real(key, value);
  } else if (key == "sweep.to") {
    c.sweep_to = parse_real(key, value);
  } else if (key == "sweep.count") {
    c.sweep_count = static_cast<int>(parse_integer(key, value));
  } else if (key == "seed") {
    c.seed = static_cast<unsigned long long>(parse_integer(key, value));
  } else if (key == "out") {
    c.out_dir = value;
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

}  // namespace

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw UsageError(path + ":" + std::to_string(lineno) + ": empty key or value");
    try {
      assign(c, key, value);
    } catch (const UsageError& e) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw UsageError("override '" + assignment + "' is not of the form key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty() || value.empty())
    throw UsageError("override '" + assignment + "' has an empty key or value");
  assign(config, key, value);
}

void validate(const RunConfig& config) {
  auto finite = [](const char* name, double v) {
    if (!std::isfinite(v)) throw UsageError(std::string("config key ") + name + " is not finite");
  };
  finite("a.alpha", config.power.alpha);
  finite("b.mu", config.power.mu);
  finite("b.beta", config.power.beta_b);
  finite("d.gamma", config.power.gamma_d);
  finite("lambda", config.lambda);
  if (config.lambda_rel) finite("lambda.rel", *config.lambda_rel);
  finite("beta_damp", config.beta_damp);
  finite("time.dt", config.dt);
  finite("time.t_final", config.t_final);
  if (config.profile_kind == "tabulated" && config.tabulated_path.empty())
    throw UsageError("profile = tabulated needs tabulated.path");
  if (config.mesh_n < 8) throw UsageError("mesh.n = " + std::to_string(config.mesh_n) + " < 8");
  if (config.mesh_q && !(*config.mesh_q >= 1.0))
    throw UsageError("mesh.q must be >= 1 when given");
  if (config.quad_points < 2 || config.quad_points > 6)
    throw UsageError("quadrature.points outside 2..6");
  if (!(config.dt > 0.0)) throw UsageError("time.dt must be positive");
  if (config.t_final < 0.0) throw UsageError("time.t_final must be nonnegative");
  if (config.stride < 1) throw UsageError("time.stride must be >= 1");
  if (config.spectral_n0 < 8) throw UsageError("spectral.n0 must be >= 8");
  if (config.spectral_levels < 2 || config.spectral_levels > 8)
    throw UsageError("spectral.levels outside 2..8");
  if (!(config.diag_t > config.diag_s) || !(config.diag_s > 0.0))
    throw UsageError("diagnostics window needs 0 < diag.s < diag.t");
  if (!config.sweep_parameter.empty()) {
    if (config.sweep_count < 2) throw UsageError("sweep.count must be >= 2");
    finite("sweep.from", config.sweep_from);
    finite("sweep.to", config.sweep_to);
  }
}

CoefficientProfile make_profile(const RunConfig& config) {
  if (config.profile_kind == "tabulated") {
    return CoefficientProfile::tabulated_csv(config.tabulated_path, config.lambda,
                                             config.beta_damp);
  }
  const double lambda = config.lambda_rel ? 0.0 : config.lambda;
  return CoefficientProfile::power_law(config.power.alpha, config.power.mu, config.power.beta_b,
                                       config.power.gamma_d, lambda, config.beta_damp);
}

}  // namespace degwave
