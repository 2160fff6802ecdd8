#include "degwave/coefficients.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "degwave/errors.hpp"
#include "degwave/quadrature.hpp"

namespace degwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<double> make_grid(int uniform_n) {
  std::vector<double> g;
  g.reserve(uniform_n + 56);
  g.push_back(0.0);
  for (int j = 52; j >= 0; --j) g.push_back(std::ldexp(1.0, -j));
  for (int k = 1; k <= uniform_n; ++k) g.push_back(static_cast<double>(k) / uniform_n);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double central_ratio(const std::function<double(double)>& g, double x) {
  const double h = 1e-6 * x;
  const double gp = (g(x + h) - g(x - h)) / (2.0 * h);
  const double gx = g(x);
  if (!std::isfinite(gp) || !std::isfinite(gx)) {
    throw InvalidCoefficientError("non-finite coefficient sample near x = " + fmt(x));
  }
  if (!(gx > 0.0)) {
    throw InvalidCoefficientError("coefficient not positive at x = " + fmt(x) +
                                  " (value " + fmt(gx) + ")");
  }
  return x * std::abs(gp) / gx;
}

}  // namespace

const std::vector<double>& supremum_grid() {
  static const std::vector<double> grid = make_grid(1024);
  return grid;
}

double degeneracy_exponent(double power_law_exponent) { return power_law_exponent; }

double degeneracy_exponent(const std::function<double(double)>& g, double rel_tol) {
  double prev = -kInf;
  for (int level = 0; level < 9; ++level) {
    const std::vector<double> grid = make_grid(512 << level);
    double sup = 0.0;
    for (double x : grid) {
      if (x <= 0.0 || x >= 1.0) continue;
      sup = std::max(sup, central_ratio(g, x));
    }
    // endpoint x = 1 with a one-sided-safe step
    sup = std::max(sup, central_ratio(g, 1.0 - 1e-9));
    if (level > 0 && std::abs(sup - prev) <= rel_tol * std::max(sup, 1e-300)) return sup;
    prev = sup;
  }
  throw NumericalError("degeneracy exponent did not stabilize within rel tol " + fmt(rel_tol));
}

CoefficientProfile CoefficientProfile::power_law(double alpha, double mu, double beta_b,
                                                 double gamma_d, double lambda,
                                                 double beta_damp) {
  for (double v : {alpha, mu, beta_b, gamma_d, lambda, beta_damp}) {
    if (!std::isfinite(v)) throw InvalidCoefficientError("non-finite profile parameter");
  }
  if (beta_damp < 0.0) {
    throw InvalidCoefficientError("boundary gain beta = " + fmt(beta_damp) + " < 0");
  }
  CoefficientProfile p;
  p.power_ = PowerLawParams{alpha, mu, beta_b, gamma_d};
  p.a_ = [alpha](double x) { return std::pow(x, alpha); };
  p.b_ = [mu, beta_b](double x) { return mu == 0.0 ? 0.0 : mu * std::pow(x, beta_b); };
  p.d_ = [gamma_d](double x) { return std::pow(x, gamma_d); };
  p.lambda_ = lambda;
  p.beta_damp_ = beta_damp;
  return p;
}

CoefficientProfile CoefficientProfile::tabulated(Fn a, Fn b, Fn d, double lambda,
                                                 double beta_damp) {
  if (!a || !b || !d) throw InvalidCoefficientError("tabulated profile needs all three functions");
  if (beta_damp < 0.0) {
    throw InvalidCoefficientError("boundary gain beta = " + fmt(beta_damp) + " < 0");
  }
  CoefficientProfile p;
  p.a_ = std::move(a);
  p.b_ = std::move(b);
  p.d_ = std::move(d);
  p.lambda_ = lambda;
  p.beta_damp_ = beta_damp;
  return p;
}

CoefficientProfile CoefficientProfile::tabulated_csv(const std::string& path, double lambda,
                                                     double beta_damp) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open coefficient table: " + path);
  auto xs = std::make_shared<std::vector<double>>();
  auto cols = std::make_shared<std::array<std::vector<double>, 3>>();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, va, vb, vd;
    if (!(row >> x >> va >> vb >> vd)) {
      if (xs->empty()) continue;  // header line
      throw UsageError("malformed row in coefficient table: " + path);
    }
    xs->push_back(x);
    (*cols)[0].push_back(va);
    (*cols)[1].push_back(vb);
    (*cols)[2].push_back(vd);
  }
  if (xs->size() < 2 || !std::is_sorted(xs->begin(), xs->end())) {
    throw UsageError("coefficient table needs at least two rows with ascending x: " + path);
  }
  auto interp = [xs](const std::vector<double>& ys) {
    return [xs, ys](double x) {
      if (x <= xs->front()) return ys.front();
      if (x >= xs->back()) return ys.back();
      auto it = std::upper_bound(xs->begin(), xs->end(), x);
      const std::size_t i = static_cast<std::size_t>(it - xs->begin());
      const double t = (x - (*xs)[i - 1]) / ((*xs)[i] - (*xs)[i - 1]);
      return (1.0 - t) * ys[i - 1] + t * ys[i];
    };
  };
  return tabulated(interp((*cols)[0]), interp((*cols)[1]), interp((*cols)[2]), lambda, beta_damp);
}

const PowerLawParams& CoefficientProfile::power() const {
  if (!power_) throw std::logic_error("profile is not power-law");
  return *power_;
}

CoefficientProfile CoefficientProfile::with_lambda(double lambda) const {
  CoefficientProfile p = *this;
  p.lambda_ = lambda;
  return p;
}

double CoefficientProfile::k_a() const {
  if (power_) return power_->alpha;
  return degeneracy_exponent(a_);
}

double CoefficientProfile::k_d() const {
  if (power_) return power_->gamma_d;
  return degeneracy_exponent(d_);
}

void CoefficientProfile::require_wellformed() const {
  if (power_) {
    if (!(power_->alpha > 0.0)) {
      throw InvalidCoefficientError("a(0) = 0 required: power-law exponent alpha = " +
                                    fmt(power_->alpha) + " <= 0 gives a(0) = 1");
    }
    if (!(power_->gamma_d > 0.0)) {
      throw InvalidCoefficientError("d(0) = 0 required: power-law exponent gamma = " +
                                    fmt(power_->gamma_d) + " <= 0 gives d(0) = 1");
    }
    if (power_->mu != 0.0 && !(power_->beta_b > power_->alpha - 1.0)) {
      throw IntegrabilityError("b/a not integrable near 0: beta_b = " + fmt(power_->beta_b) +
                               " <= alpha - 1 = " + fmt(power_->alpha - 1.0));
    }
    return;
  }
  const double a0 = a_(0.0), d0 = d_(0.0);
  const double scale_a = std::abs(a_(1.0)), scale_d = std::abs(d_(1.0));
  if (!(std::abs(a0) <= 1e-12 * std::max(scale_a, 1.0))) {
    throw InvalidCoefficientError("a(0) = " + fmt(a0) + " != 0");
  }
  if (!(std::abs(d0) <= 1e-12 * std::max(scale_d, 1.0))) {
    throw InvalidCoefficientError("d(0) = " + fmt(d0) + " != 0");
  }
  for (double x : supremum_grid()) {
    if (x <= 0.0) continue;
    const double ax = a_(x), dx = d_(x);
    if (!std::isfinite(ax) || !std::isfinite(dx) || !std::isfinite(b_(x))) {
      throw InvalidCoefficientError("non-finite coefficient sample at x = " + fmt(x));
    }
    if (!(ax > 0.0)) throw InvalidCoefficientError("a(" + fmt(x) + ") = " + fmt(ax) + " <= 0");
    if (!(dx > 0.0)) throw InvalidCoefficientError("d(" + fmt(x) + ") = " + fmt(dx) + " <= 0");
  }
  // integrability probe: the tail integral of |b|/a must settle as the lower
  // limit shrinks
  auto ratio = [this](double x) { return std::abs(b_(x)) / a_(x); };
  const double tail_a = integrate_toward_zero(ratio, std::ldexp(1.0, -24), 0.5, 1e-9);
  const double tail_b = integrate_toward_zero(ratio, std::ldexp(1.0, -48), 0.5, 1e-9);
  if (!(std::abs(tail_b - tail_a) <= 1e-4 * std::max(1.0, std::abs(tail_b)))) {
    throw IntegrabilityError("b/a looks non-integrable near 0: tail integral moved from " +
                             fmt(tail_a) + " to " + fmt(tail_b) +
                             " while shrinking the lower limit");
  }
}

namespace {

/// Cumulative exponent table for tabulated profiles:
/// I(x) = int_{1/2}^x b/a, evaluated on demand from the nearest anchor.
struct EtaTable {
  std::vector<double> anchors;
  std::vector<double> exponents;  // I(anchor)
  std::function<double(double)> ratio;

  double exponent_at(double x) const {
    const double lo = anchors.front();
    if (x <= lo) x = lo;
    auto it = std::upper_bound(anchors.begin(), anchors.end(), x);
    const std::size_t i = (it == anchors.begin()) ? 0 : static_cast<std::size_t>(it - anchors.begin()) - 1;
    const double base = exponents[i];
    if (x == anchors[i]) return base;
    return base + integrate_adaptive(ratio, anchors[i], x, 1e-12);
  }
};

}  // namespace

WeightPair feller_weight(const CoefficientProfile& profile) {
  profile.require_wellformed();
  WeightPair w;
  std::function<double(double)> a_of = [&profile](double x) { return profile.a(x); };

  if (profile.is_power_law()) {
    const PowerLawParams p = profile.power();
    const double r = p.beta_b - p.alpha + 1.0;
    const double mu = p.mu, alpha = p.alpha;
    if (mu == 0.0) {
      w.eta = [](double) { return 1.0; };
      w.sigma = [alpha](double x) { return std::pow(x, alpha); };
    } else {
      const double anchor = std::pow(0.5, r);
      w.eta = [mu, r, anchor](double x) { return std::exp(mu * (std::pow(x, r) - anchor) / r); };
      auto eta = w.eta;
      w.sigma = [alpha, eta](double x) { return std::pow(x, alpha) / eta(x); };
    }
  } else {
    auto table = std::make_shared<EtaTable>();
    table->ratio = [profile](double x) { return profile.b(x) / profile.a(x); };
    for (double x : supremum_grid()) {
      if (x > 0.0) table->anchors.push_back(x);
    }
    table->exponents.resize(table->anchors.size());
    const auto mid = std::lower_bound(table->anchors.begin(), table->anchors.end(), 0.5);
    const std::size_t mid_i = static_cast<std::size_t>(mid - table->anchors.begin());
    table->exponents[mid_i] = integrate_adaptive(table->ratio, 0.5, table->anchors[mid_i], 1e-12);
    for (std::size_t i = mid_i + 1; i < table->anchors.size(); ++i) {
      table->exponents[i] = table->exponents[i - 1] +
                            integrate_adaptive(table->ratio, table->anchors[i - 1],
                                               table->anchors[i], 1e-11);
    }
    for (std::size_t i = mid_i; i-- > 0;) {
      table->exponents[i] = table->exponents[i + 1] -
                            integrate_adaptive(table->ratio, table->anchors[i],
                                               table->anchors[i + 1], 1e-11);
    }
    w.eta = [table](double x) { return std::exp(table->exponent_at(x)); };
    auto eta = w.eta;
    w.sigma = [a_of, eta](double x) { return a_of(x) / eta(x); };
  }

  double lo = kInf, hi = -kInf;
  for (double x : supremum_grid()) {
    const double e = w.eta(x);
    if (!std::isfinite(e) || !(e > 0.0)) {
      throw NumericalError("weight eta not finite/positive at x = " + fmt(x));
    }
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  w.eta_min = lo;
  w.eta_max = hi;
  w.eta_at_1 = w.eta(1.0);
  w.sigma_at_1 = w.sigma(1.0);
  return w;
}

DegeneracyReport check_hypotheses(const CoefficientProfile& profile, const HardyConstants& hardy) {
  DegeneracyReport rep;
  auto fail = [&rep](const std::string& msg) { rep.diagnostics.push_back(msg); };

  bool wellformed = true;
  try {
    profile.require_wellformed();
  } catch (const Error& e) {
    wellformed = false;
    fail(e.what());
  }

  rep.k_a = profile.k_a();
  rep.k_d = profile.k_d();

  bool ka_ok = rep.k_a > 0.0 && rep.k_a < 2.0;
  bool kd_ok = rep.k_d > 0.0 && rep.k_d < 2.0;
  if (!ka_ok) fail("K_a = " + fmt(rep.k_a) + " outside (0,2): a neither (WD) nor (SD)");
  if (!kd_ok) fail("K_d = " + fmt(rep.k_d) + " outside (0,2): d neither (WD) nor (SD)");

  // drift continuity: for power-law drift we ask for b(0) = 0 as in the
  // power-law stability example (beta_b > 0 unless b vanishes identically)
  bool drift_ok = true;
  if (profile.is_power_law()) {
    const PowerLawParams p = profile.power();
    if (p.mu != 0.0 && !(p.beta_b > 0.0)) {
      drift_ok = false;
      fail("drift exponent beta_b = " + fmt(p.beta_b) + " <= 0 with mu = " + fmt(p.mu) +
           " != 0 (b must be continuous with b(0) = 0)");
    }
  }

  // sup |b|, sup x|b|/a, and the Ass.2 margin on the evaluation grid
  double sup_b = 0.0, sup_xba = 0.0;
  double eps0 = 2.0 - rep.k_a - 2.0 * rep.k_d;  // x -> 0 limit of the Ass.2 expression
  bool samples_ok = wellformed;
  if (samples_ok) {
    for (double x : supremum_grid()) {
      if (x <= 0.0) continue;
      const double bx = std::abs(profile.b(x));
      const double ax = profile.a(x);
      sup_b = std::max(sup_b, bx);
      sup_xba = std::max(sup_xba, x * bx / ax);
      eps0 = std::min(eps0, 2.0 - rep.k_a - 2.0 * rep.k_d - 2.0 * x * bx / ax);
    }
  }
  rep.epsilon0 = eps0;
  const double a1 = profile.a(1.0);
  rep.m_tilde = sup_b / a1;
  rep.m = (rep.k_a <= 1.0) ? rep.m_tilde : sup_xba;

  rep.hyp1_ok = wellformed && ka_ok && kd_ok && drift_ok;

  const double lam = profile.lambda();
  const double chp = hardy.c_hp_safe > 0.0 ? hardy.c_hp_safe : hardy.c_hp;
  rep.hyp2_ok = chp > 0.0 && lam < 1.0 / chp;
  if (!rep.hyp2_ok) {
    fail("lambda = " + fmt(lam) + " >= 1/C_HP = " + fmt(chp > 0.0 ? 1.0 / chp : 0.0));
  }

  bool sum_ok = rep.k_a + 2.0 * rep.k_d <= 2.0;
  if (!sum_ok) fail("K_a + 2 K_d = " + fmt(rep.k_a + 2.0 * rep.k_d) + " > 2");
  bool sd_drift_ok = rep.k_a <= 1.0 || std::isfinite(sup_xba);
  if (!sd_drift_ok) fail("K_a = " + fmt(rep.k_a) + " > 1 and x b / a unbounded");
  rep.hyp3_ok = rep.hyp1_ok && sum_ok && sd_drift_ok;

  rep.ass2_ok = rep.hyp3_ok && eps0 > 0.0;
  if (rep.hyp3_ok && !(eps0 > 0.0)) {
    fail("epsilon_0 = min[(2 - K_a - 2 K_d) - 2 x|b|/a] = " + fmt(eps0) + " <= 0");
  }

  rep.lambda_range_ok = rep.hyp2_ok;
  if (lam < 0.0) {
    const double denom = 2.0 * chp * (1.0 + 1.5 * rep.k_a + rep.k_d + rep.m);
    const double lower = denom > 0.0 ? -eps0 / denom : -kInf;
    if (!(lam > lower)) {
      rep.lambda_range_ok = false;
      fail("lambda = " + fmt(lam) + " <= -epsilon_0 / (2 C_HP (1 + 3K_a/2 + K_d + M)) = " +
           fmt(lower));
    }
  }
  return rep;
}

}  // namespace degwave
