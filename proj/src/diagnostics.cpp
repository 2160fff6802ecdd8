#include "degwave/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "degwave/assembly.hpp"
#include "degwave/errors.hpp"
#include "degwave/gauss.hpp"

namespace degwave {

namespace {

std::size_t aligned_index(const std::vector<double>& times, double t, const char* what) {
  if (times.empty()) throw UsageError(std::string(what) + ": no recorded samples");
  auto it = std::lower_bound(times.begin(), times.end(), t);
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  if (it != times.end() && std::abs(*it - t) <= tol)
    return static_cast<std::size_t>(it - times.begin());
  if (it != times.begin() && std::abs(*(it - 1) - t) <= tol)
    return static_cast<std::size_t>(it - times.begin()) - 1;
  throw UsageError(std::string(what) + " = " + std::to_string(t) +
                   " does not coincide with a recorded sample time");
}

/// Weighted element integrals of low-degree polynomials in the local
/// coordinate against eta(x) x^(-p), cached per element for each exponent
/// the identities need.
class ElementIntegrals {
public:
  enum Slot { p_zero = 0, p_a, p_ad, p_am1, p_r, p_ar, p_adr, kNumSlots };

  ElementIntegrals(const Trajectory& traj, const CoefficientProfile& profile)
      : mesh_(traj.mesh) {
    if (!profile.is_power_law())
      throw UsageError(
          "identity diagnostics need a power-law profile (the integrands use exact "
          "coefficient derivatives); tabulated profiles are unsupported");
    const PowerLawParams pp = profile.power();
    alpha = pp.alpha;
    gamma = pp.gamma_d;
    mu = pp.mu;
    r = pp.beta_b - pp.alpha + 1.0;
    lambda = profile.lambda();
    const WeightPair weights = feller_weight(profile);
    eta1 = weights.eta_at_1;
    sigma1 = weights.sigma_at_1;
    d1 = profile.d(1.0);

    const int n = mesh_.n;
    h_.resize(n);
    eta_c_.resize(n);
    std::array<double, kNumSlots> pval{};
    std::array<bool, kNumSlots> used{};
    pval[p_zero] = 0.0;
    pval[p_a] = alpha;
    pval[p_ad] = alpha + gamma;
    pval[p_am1] = alpha - 1.0;
    used[p_zero] = used[p_a] = used[p_ad] = used[p_am1] = true;
    if (mu != 0.0) {
      pval[p_r] = -r;
      pval[p_ar] = alpha - r;
      pval[p_adr] = alpha + gamma - r;
      used[p_r] = used[p_ar] = used[p_adr] = true;
    }
    for (int s = 0; s < kNumSlots; ++s)
      if (used[s]) mom_[s].resize(n);

    const GaussRule& rule = gauss_rule(4);
    std::vector<double> samples(4);
    for (int e = 0; e < n; ++e) {
      const double xl = mesh_.nodes[e];
      const double xr = mesh_.nodes[e + 1];
      h_[e] = xr - xl;
      if (mu == 0.0) {
        eta_c_[e] = {1.0};
      } else {
        for (int g = 0; g < 4; ++g) {
          const double x = xl + h_[e] * rule.nodes[g];
          samples[g] = std::exp(mu * (std::pow(x, r) - std::pow(0.5, r)) / r);
        }
        eta_c_[e] = gauss_interp_coeffs(samples, 4);
      }
      for (int s = 0; s < kNumSlots; ++s) {
        if (!used[s]) continue;
        int kmin = 0;
        if (xl == 0.0) kmin = std::max(0, static_cast<int>(std::floor(pval[s] - 1.0)) + 1);
        const std::vector<double> m = elemquad::local_moments(xl, xr, pval[s], kmin, 5);
        std::copy(m.begin(), m.end(), mom_[s][e].begin());
      }
    }
  }

  int elements() const { return mesh_.n; }
  double h(int e) const { return h_[e]; }

  /// integral over element e of P(u) eta(x) x^(-p) dx for a quadratic P;
  /// only coefficients multiplying convergent moments may be nonzero
  double weighted(Slot s, int e, double q0, double q1, double q2) const {
    const std::vector<double>& c = eta_c_[e];
    const std::array<double, 6>& m = mom_[s][e];
    const double q[3] = {q0, q1, q2};
    double acc = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double cj = c[j];
      for (int i = 0; i < 3; ++i) acc += q[i] * cj * m[i + j];
    }
    return acc;
  }

  double alpha = 0.0, gamma = 0.0, mu = 0.0, r = 0.0, lambda = 0.0;
  double eta1 = 0.0, sigma1 = 0.0, d1 = 0.0;

private:
  Mesh mesh_;
  std::vector<double> h_;
  std::vector<std::vector<double>> eta_c_;
  std::array<std::vector<std::array<double, 6>>, kNumSlots> mom_;
};

/// All spatial integrals the two identities need, at one time sample.
struct SpaceTerms {
  double eta_r = 0.0;     // int eta x^r y_x^2
  double kin_base = 0.0;  // int eta x^-alpha y_t^2
  double kin_shift = 0.0; // int eta x^(r-alpha) y_t^2
  double stiff = 0.0;     // int eta y_x^2
  double pot_base = 0.0;  // int eta x^-(alpha+gamma) y^2
  double pot_shift = 0.0; // int eta x^(r-alpha-gamma) y^2
  double x1 = 0.0;        // int x y_x y_t / sigma
  double x2 = 0.0;        // int y y_t / sigma
};

SpaceTerms space_terms(const ElementIntegrals& ei, const std::vector<double>& y,
                       const std::vector<double>& v) {
  SpaceTerms st;
  const bool has_mu = ei.mu != 0.0;
  for (int e = 0; e < ei.elements(); ++e) {
    const double yl = y[e], yr = y[e + 1];
    const double vl = v[e], vr = v[e + 1];
    const double dy = yr - yl, dv = vr - vl;
    const double yx = dy / ei.h(e);
    const double yx2 = yx * yx;
    // squares/products of the linear nodal interpolants in u
    const double v2_0 = vl * vl, v2_1 = 2.0 * vl * dv, v2_2 = dv * dv;
    const double y2_0 = yl * yl, y2_1 = 2.0 * yl * dy, y2_2 = dy * dy;
    const double yv_0 = yl * vl, yv_1 = yl * dv + vl * dy, yv_2 = dy * dv;

    st.stiff += yx2 * ei.weighted(ElementIntegrals::p_zero, e, 1.0, 0.0, 0.0);
    st.kin_base += ei.weighted(ElementIntegrals::p_a, e, v2_0, v2_1, v2_2);
    st.pot_base += ei.weighted(ElementIntegrals::p_ad, e, y2_0, y2_1, y2_2);
    st.x1 += yx * ei.weighted(ElementIntegrals::p_am1, e, vl, dv, 0.0);
    st.x2 += ei.weighted(ElementIntegrals::p_a, e, yv_0, yv_1, yv_2);
    if (has_mu) {
      st.eta_r += yx2 * ei.weighted(ElementIntegrals::p_r, e, 1.0, 0.0, 0.0);
      st.kin_shift += ei.weighted(ElementIntegrals::p_ar, e, v2_0, v2_1, v2_2);
      st.pot_shift += ei.weighted(ElementIntegrals::p_adr, e, y2_0, y2_1, y2_2);
    }
  }
  return st;
}

struct Window {
  std::size_t first = 0;
  std::size_t last = 0;
  double dt = 0.0;
  double weight(std::size_t k) const {
    return (k == first || k == last) ? 0.5 * dt : dt;
  }
};

Window window_for(const Trajectory& traj, double s, double t_end) {
  if (!(t_end > s)) throw UsageError("need t_end > s for the identity window");
  Window w;
  w.first = aligned_index(traj.times, s, "window start s");
  w.last = aligned_index(traj.times, t_end, "window end");
  if (w.last <= w.first + 1) throw UsageError("identity window holds fewer than 3 samples");
  w.dt = traj.dt;
  for (std::size_t k = w.first; k < w.last; ++k) {
    if (std::abs(traj.times[k + 1] - traj.times[k] - traj.dt) > 1e-9)
      throw UsageError("identity diagnostics need densely stored samples (stride 1)");
  }
  return w;
}

double boundary_yx(const Trajectory& traj, const std::vector<double>& y) {
  const std::size_t n = y.size() - 1;
  return (y[n] - y[n - 1]) / (traj.mesh.nodes[n] - traj.mesh.nodes[n - 1]);
}

double relative_residual(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

}  // namespace

IdentityReport multiplier_residual(const Trajectory& traj, const CoefficientProfile& profile,
                                   double s, double t_end) {
  const ElementIntegrals ei(traj, profile);
  const Window w = window_for(traj, s, t_end);
  const double al = ei.alpha, ga = ei.gamma, mu = ei.mu, la = ei.lambda;

  double dist = 0.0, trace = 0.0;
  double x1_start = 0.0, x1_end = 0.0;
  for (std::size_t k = w.first; k <= w.last; ++k) {
    const SpaceTerms st = space_terms(ei, traj.y[k], traj.v[k]);
    const double d = -mu * st.eta_r + (1.0 - al) * st.kin_base + mu * st.kin_shift + st.stiff +
                     la * ((1.0 - al - ga) * st.pot_base + mu * st.pot_shift);
    const double yn = traj.y[k].back();
    const double vn = traj.v[k].back();
    const double yxn = boundary_yx(traj, traj.y[k]);
    const double tr = vn * vn / ei.sigma1 + ei.eta1 * yxn * yxn +
                      la / (ei.sigma1 * ei.d1) * yn * yn;
    const double wt = w.weight(k);
    dist += wt * d;
    trace += wt * tr;
    if (k == w.first) x1_start = st.x1;
    if (k == w.last) x1_end = st.x1;
  }
  IdentityReport rep;
  rep.identity_name = "space-time multiplier identity";
  rep.lhs = dist;
  rep.rhs = -2.0 * (x1_end - x1_start) + trace;
  rep.residual = relative_residual(rep.lhs, rep.rhs);
  rep.notes =
      "all boundary-trace integrals taken over [s, t_end], including the y^2(t,1) term";
  return rep;
}

IdentityReport bt_identity_residual(const Trajectory& traj, const CoefficientProfile& profile,
                                    double s, double t_end) {
  const ElementIntegrals ei(traj, profile);
  const Window w = window_for(traj, s, t_end);
  const double al = ei.alpha, ga = ei.gamma, mu = ei.mu, la = ei.lambda;
  const double ka2 = al / 2.0;  // K_a / 2; the power-law exponent is exact

  double dist = 0.0, btrace = 0.0;
  double bracket_start = 0.0, bracket_end = 0.0;
  for (std::size_t k = w.first; k <= w.last; ++k) {
    const SpaceTerms st = space_terms(ei, traj.y[k], traj.v[k]);
    const double d = (1.0 - ka2) * st.kin_base + mu * st.kin_shift +
                     (1.0 - ka2) * st.stiff - mu * st.eta_r +
                     la * ((1.0 - ka2 - ga) * st.pot_base + mu * st.pot_shift);
    const double yn = traj.y[k].back();
    const double vn = traj.v[k].back();
    const double yxn = boundary_yx(traj, traj.y[k]);
    const double tr = vn * vn / ei.sigma1 + ei.eta1 * yxn * yxn - ka2 * ei.eta1 * yxn * yn +
                      la / (ei.sigma1 * ei.d1) * yn * yn;
    const double wt = w.weight(k);
    dist += wt * d;
    btrace += wt * tr;
    if (k == w.first) bracket_start = -2.0 * st.x1 + ka2 * st.x2;
    if (k == w.last) bracket_end = -2.0 * st.x1 + ka2 * st.x2;
  }
  IdentityReport rep;
  rep.identity_name = "boundary-term splitting identity";
  rep.lhs = (bracket_end - bracket_start) + btrace;
  rep.rhs = dist;
  rep.residual = relative_residual(rep.lhs, rep.rhs);
  return rep;
}

TraceBoundReport trace_bound_check(const EnergyTrace& trace, const DecayCertificate& cert, double s,
                                   double t_end, double delta) {
  if (!(t_end > s)) throw UsageError("need t_end > s for the trace-bound window");
  if (!(delta > 0.0) || !(delta < cert.delta0))
    throw UsageError("delta must lie in (0, delta_0)");
  const std::size_t is = aligned_index(trace.times, s, "window start s");
  const std::size_t it = aligned_index(trace.times, t_end, "window end");
  if (it <= is) throw UsageError("trace-bound window is empty");

  double int_y2 = 0.0, int_e = 0.0, int_q = 0.0;
  const ProfileScalars& sc = cert.scalars;
  for (std::size_t k = is; k <= it; ++k) {
    // trapezoid with possibly uneven spacing: half-intervals on both sides
    double wk = 0.0;
    if (k > is) wk += 0.5 * (trace.times[k] - trace.times[k - 1]);
    if (k < it) wk += 0.5 * (trace.times[k + 1] - trace.times[k]);
    const double y1 = trace.boundary_y[k];
    const double e = trace.energy[k];
    int_y2 += wk * y1 * y1;
    int_e += wk * e;
    int_q += wk * (2.0 * e - sc.beta * y1 * y1);
  }

  const double e_s = trace.energy[is];
  TraceBoundReport rep;
  rep.s = s;
  rep.t_end = t_end;
  rep.delta = delta;

  const double c3d = c3_at(sc, cert.gauge, delta);
  rep.trace_by_energy.name = "boundary trace bounded by energy";
  rep.trace_by_energy.lhs = int_y2;
  rep.trace_by_energy.rhs = c3d * e_s + delta * cert.c4 * int_e;

  rep.energy_by_trace.name = "energy bounded by boundary trace";
  rep.energy_by_trace.lhs = 0.5 * sc.epsilon0 * int_q;
  double rhs = cert.c1 * e_s + (cert.c2 - sc.beta * sc.epsilon0 / 2.0) * int_y2;
  if (sc.lambda < 0.0)
    rhs += -2.0 * sc.lambda * sc.c_hp * (1.0 + 1.5 * sc.k_a + sc.k_d + sc.m) * int_e;
  rep.energy_by_trace.rhs = rhs;

  for (TraceBoundEntry* entry : {&rep.trace_by_energy, &rep.energy_by_trace}) {
    entry->slack = entry->rhs - entry->lhs;
    entry->holds = entry->lhs <= entry->rhs;
  }
  return rep;
}

}  // namespace degwave
