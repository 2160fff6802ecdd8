#pragma once

#include <optional>
#include <vector>

#include "degwave/assembly.hpp"
#include "degwave/coefficients.hpp"
#include "degwave/hardy.hpp"

namespace degwave {

/// Derived constants of the lambda gauge.  epsilon is only set for
/// 0 < lambda < 1/C_HP; one_eps is 1 for lambda <= 0 and epsilon otherwise.
struct LambdaGauge {
  double lambda = 0.0;
  std::optional<double> epsilon;
  double one_eps = 1.0;
  double c_lambda = 0.0;  ///< 1/sqrt(one_eps * min eta)
};

/// Settings of the Hardy constant ladder.
struct SpectralOptions {
  int n0 = 64;      ///< coarsest mesh
  int levels = 4;   ///< refinement levels (mesh doubles each level), >= 2
  double tol = 1e-10;
  int max_iterations = 500;
};

/// Discrete best constants at a single mesh: pair (C_HP, C_HP_tilde) from
/// the smallest eigenvalues of the pencils (K, S) and (K0, B).
std::pair<double, double> discrete_hardy(const OperatorMatrices& matrices,
                                         const SpectralOptions& opts = {});

/// Hardy constants over the refinement ladder, with Richardson correction
/// when the last two levels agree to 1e-4 and a safety margin of three last
/// increments folded into the `*_safe` values.
HardyConstants best_constants(const CoefficientProfile& profile, const WeightPair& weights,
                              const SpectralOptions& opts = {});

/// Gauge from lambda and the (safe) Hardy constant.  Throws
/// InadmissibleLambdaError when lambda >= 1/C_HP.
LambdaGauge lambda_gauge(double lambda, const HardyConstants& hardy, double eta_min);

/// Steady state of the stationary problem with boundary load gamma:
/// (K - lambda S + beta e_N e_N^T) Z = gamma e_N.
struct SteadyState {
  std::vector<double> z;  ///< nodal values including the pinned node 0
  double gamma = 0.0;
  double triple_norm_sq = 0.0;  ///< Z^T K Z - lambda Z^T S Z + beta Z_N^2
  double weighted_l2_sq = 0.0;  ///< Z^T B Z
};

SteadyState solve_steady(const OperatorMatrices& matrices, double gamma, double lambda,
                         double beta_damp);

/// Smallest generalized eigenvalue of A u = mu M u (A, M SPD) by inverse
/// iteration with optional M-orthogonal deflation.
struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  int iterations = 0;
};

EigenPair smallest_eigenpair(const SymTridiag& a, const SymTridiag& m, double tol = 1e-10,
                             int max_iterations = 500,
                             const std::vector<std::vector<double>>* deflate = nullptr);

}  // namespace degwave
