#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "degwave/hardy.hpp"

namespace degwave {

/// Parameters of the power-law family a = x^alpha, b = mu x^beta_b,
/// d = x^gamma_d.
struct PowerLawParams {
  double alpha = 0.0;
  double mu = 0.0;
  double beta_b = 0.0;
  double gamma_d = 0.0;
};

/// Degenerate/singular coefficient triple (a, b, d) on [0,1] plus the
/// zeroth-order coupling lambda and the boundary feedback gain beta.
/// a and d must vanish at x = 0 and be positive on (0,1]; b is a drift
/// whose ratio b/a is integrable near 0.
class CoefficientProfile {
public:
  using Fn = std::function<double(double)>;

  static CoefficientProfile power_law(double alpha, double mu, double beta_b, double gamma_d,
                                      double lambda, double beta_damp);
  static CoefficientProfile tabulated(Fn a, Fn b, Fn d, double lambda, double beta_damp);
  /// CSV with columns x,a,b,d (one header line optional), x ascending over [0,1].
  static CoefficientProfile tabulated_csv(const std::string& path, double lambda,
                                          double beta_damp);

  bool is_power_law() const { return power_.has_value(); }
  const PowerLawParams& power() const;

  double a(double x) const { return a_(x); }
  double b(double x) const { return b_(x); }
  double d(double x) const { return d_(x); }
  double lambda() const { return lambda_; }
  double beta_damp() const { return beta_damp_; }

  /// Same coefficients with a different coupling constant.
  CoefficientProfile with_lambda(double lambda) const;

  /// Degeneracy exponents of a and d (exact for power-law profiles).
  double k_a() const;
  double k_d() const;

  /// Structural requirements: a(0) = d(0) = 0, positivity away from 0,
  /// b/a integrable near 0.  Throws InvalidCoefficientError or
  /// IntegrabilityError naming the violated condition.
  void require_wellformed() const;

private:
  CoefficientProfile() = default;

  std::optional<PowerLawParams> power_;
  Fn a_, b_, d_;
  double lambda_ = 0.0;
  double beta_damp_ = 0.0;
};

/// The Feller-type weight eta(x) = exp(int_{1/2}^x b/a ds) and sigma = a/eta,
/// with extrema taken over the standard evaluation grid plus endpoints.
struct WeightPair {
  std::function<double(double)> eta;
  std::function<double(double)> sigma;
  double eta_min = 0.0;
  double eta_max = 0.0;
  double eta_at_1 = 0.0;
  double sigma_at_1 = 0.0;
};

/// Hypothesis verdicts and the constants derived from the coefficient
/// profile alone (plus the Hardy constants for the lambda checks).
struct DegeneracyReport {
  double k_a = 0.0;
  double k_d = 0.0;
  double m_tilde = 0.0;  ///< sup|b| / a(1)
  double m = 0.0;        ///< m_tilde when k_a <= 1, else sup|x b / a|
  double epsilon0 = 0.0;
  bool hyp1_ok = false;
  bool hyp2_ok = false;
  bool hyp3_ok = false;
  bool ass2_ok = false;
  bool lambda_range_ok = false;
  /// One line per violated condition, with both sides' values.
  std::vector<std::string> diagnostics;

  /// Structural conditions on the coefficients alone (lambda plays no part).
  bool structure_ok() const { return hyp1_ok && hyp3_ok && ass2_ok; }
  /// Conditions on lambda given the Hardy constants.
  bool lambda_ok() const { return hyp2_ok && lambda_range_ok; }
  bool certificate_ready() const { return structure_ok() && lambda_ok(); }
  /// Well-posedness of the dynamics needs less than the certificate.
  bool well_posed() const { return hyp1_ok && hyp2_ok && k_a + 2.0 * k_d <= 2.0; }
};

/// Evaluation grid clustered at the degenerate end: 2^-j for j = 0..52 plus
/// a uniform fill, endpoints included.
const std::vector<double>& supremum_grid();

/// Degeneracy exponent sup_(0,1] x|g'(x)|/g(x) of a power-law coefficient
/// (trivially its exponent).
double degeneracy_exponent(double power_law_exponent);

/// Degeneracy exponent of a sampled coefficient: sup over a refining grid,
/// derivatives by central differences with step 1e-6 * x, refined until the
/// sup stabilizes within rel_tol.
double degeneracy_exponent(const std::function<double(double)>& g, double rel_tol = 1e-6);

/// Weight pair for the profile.  Power-law drift integrates in closed form;
/// tabulated profiles use adaptive quadrature with absolute tolerance 1e-10.
WeightPair feller_weight(const CoefficientProfile& profile);

/// Full hypothesis check.  Never throws on a checkable violation; every
/// failed condition lands in the diagnostics list instead.
DegeneracyReport check_hypotheses(const CoefficientProfile& profile, const HardyConstants& hardy);

}  // namespace degwave
