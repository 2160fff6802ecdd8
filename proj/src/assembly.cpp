#include "degwave/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "degwave/errors.hpp"
#include "degwave/gauss.hpp"

namespace degwave {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Mesh build_mesh(int n, double q) {
  if (n < 2) throw UsageError("mesh needs at least 2 elements, got " + std::to_string(n));
  if (!(q >= 1.0) || !std::isfinite(q)) throw UsageError("mesh grading q = " + fmt(q) + " < 1");
  Mesh m;
  m.n = n;
  m.q = q;
  m.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i) m.nodes[i] = std::pow(static_cast<double>(i) / n, q);
  return m;
}

Mesh build_mesh(int n, const CoefficientProfile& profile) {
  const double ka = profile.k_a();
  double q = (ka < 2.0) ? std::max(1.0, 2.0 / (2.0 - ka)) : 4.0;
  q = std::clamp(q, 1.0, 4.0);
  return build_mesh(n, q);
}

double singular_moment(double x_l, double x_r, double p, int k) {
  if (!(x_l >= 0.0) || !(x_r > x_l)) {
    throw UsageError("singular_moment needs 0 <= x_l < x_r, got [" + fmt(x_l) + ", " + fmt(x_r) + "]");
  }
  if (k < 0 || k > 12) throw UsageError("singular_moment exponent k = " + std::to_string(k));
  const double s = k - p + 1.0;
  if (x_l == 0.0) {
    if (!(s > 0.0)) {
      throw IntegrabilityError("moment int x^(k-p) diverges at 0: k - p + 1 = " + fmt(s) + " <= 0");
    }
    return std::pow(x_r, s) / s;
  }
  const double lr = std::log(x_r / x_l);
  if (s == 0.0) return lr;
  // (x_r^s - x_l^s)/s without cancellation when s is small
  return std::pow(x_l, s) * std::expm1(s * lr) / s;
}

namespace elemquad {

std::vector<double> local_moments(double x_l, double x_r, double p, int k_min, int k_max) {
  if (k_max > 9 || k_min < 0 || k_min > k_max) throw UsageError("bad moment range");
  std::vector<double> m(k_max + 1, 0.0);
  const double h = x_r - x_l;
  if (x_l <= h) {
    // close to the degenerate end: exact moments, expanded in the local
    // coordinate (binomial amplification bounded by 2^k here)
    if (x_l == 0.0) {
      for (int k = k_min; k <= k_max; ++k) {
        m[k] = singular_moment(x_l, x_r, p, k) / std::pow(h, k);
      }
      return m;
    }
    std::vector<double> big(k_max + 1);
    for (int j = 0; j <= k_max; ++j) big[j] = singular_moment(x_l, x_r, p, j);
    for (int k = k_min; k <= k_max; ++k) {
      double acc = 0.0;
      for (int j = 0; j <= k; ++j) {
        acc += binom(k, j) * std::pow(-x_l, k - j) * big[j];
      }
      m[k] = acc / std::pow(h, k);
    }
    return m;
  }
  // far from the singularity the weight is smooth on the element
  const GaussRule& g = gauss_rule(12);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double u = g.nodes[i];
    const double w = g.weights[i] * h * std::pow(x_l + h * u, -p);
    double uk = std::pow(u, k_min);
    for (int k = k_min; k <= k_max; ++k) {
      m[k] += w * uk;
      uk *= u;
    }
  }
  return m;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

double integrate(const std::vector<double>& coeffs, const std::vector<double>& moments) {
  double s = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * moments[k];
  return s;
}

}  // namespace elemquad

namespace {

// hat-pair polynomials in the local coordinate u
const std::vector<double> kP00 = {1.0, -2.0, 1.0};  // (1-u)^2
const std::vector<double> kP01 = {0.0, 1.0, -1.0};  // u(1-u)
const std::vector<double> kP11 = {0.0, 0.0, 1.0};   // u^2

struct WeightedForm {
  double p = 0.0;                          // singular exponent
  std::function<double(double)> smooth;    // remaining smooth factor, or null for 1
};

void scatter_mass(SymTridiag& mat, int e, double e00, double e01, double e11) {
  if (e > 0) {
    mat.diag(e - 1) += e00;
    mat.off(e - 1) += e01;
  }
  mat.diag(e) += e11;
}

}  // namespace

OperatorMatrices assemble(const CoefficientProfile& profile, const WeightPair& weights,
                          const Mesh& mesh, const AssemblyOptions& opts) {
  if (opts.quad_points < 2 || opts.quad_points > 6) {
    throw UsageError("quadrature.points = " + std::to_string(opts.quad_points) + " outside 2..6");
  }
  profile.require_wellformed();

  const int n = mesh.n;
  OperatorMatrices out;
  out.mesh = mesh;
  out.b_mat = SymTridiag(n);
  out.k_mat = SymTridiag(n);
  out.k0_mat = SymTridiag(n);
  out.s_mat = SymTridiag(n);

  WeightedForm form_b, form_s, form_k;
  const bool plain_eta = profile.is_power_law() && profile.power().mu == 0.0;
  if (profile.is_power_law()) {
    const PowerLawParams pp = profile.power();
    form_b.p = pp.alpha;
    form_s.p = pp.alpha + pp.gamma_d;
    form_k.p = 0.0;
    if (!plain_eta || opts.force_smooth_interp) {
      form_b.smooth = weights.eta;
      form_s.smooth = weights.eta;
      form_k.smooth = weights.eta;
    }
  } else {
    const double ka = profile.k_a();
    const double kd = profile.k_d();
    form_b.p = ka;
    form_s.p = ka + kd;
    form_k.p = 0.0;
    form_b.smooth = [&profile, &weights, ka](double x) {
      return weights.eta(x) * std::pow(x, ka) / profile.a(x);
    };
    form_s.smooth = [&profile, &weights, ka, kd](double x) {
      return weights.eta(x) * std::pow(x, ka + kd) / (profile.a(x) * profile.d(x));
    };
    form_k.smooth = weights.eta;
  }

  const GaussRule& rule = gauss_rule(opts.quad_points);
  std::vector<double> samples(opts.quad_points);

  auto smooth_coeffs = [&](const WeightedForm& f, double xl, double h) -> std::vector<double> {
    if (!f.smooth) return {1.0};
    for (int g = 0; g < opts.quad_points; ++g) samples[g] = f.smooth(xl + h * rule.nodes[g]);
    return gauss_interp_coeffs(samples, opts.quad_points);
  };

  for (int e = 0; e < n; ++e) {
    const double xl = mesh.nodes[e];
    const double xr = mesh.nodes[e + 1];
    const double h = xr - xl;
    try {
      // mass-type forms: int P_ij(u) smooth(x) x^(-p) dx
      for (auto [form, mat] : {std::pair{&form_b, &out.b_mat}, std::pair{&form_s, &out.s_mat}}) {
        const std::vector<double> c = smooth_coeffs(*form, xl, h);
        const int kmin = (e == 0) ? 2 : 0;
        const int kmax = 2 + static_cast<int>(c.size()) - 1;
        const std::vector<double> mom = elemquad::local_moments(xl, xr, form->p, kmin, kmax);
        const double e11 = elemquad::integrate(elemquad::poly_mul(kP11, c), mom);
        if (e == 0) {
          scatter_mass(*mat, e, 0.0, 0.0, e11);
        } else {
          const double e00 = elemquad::integrate(elemquad::poly_mul(kP00, c), mom);
          const double e01 = elemquad::integrate(elemquad::poly_mul(kP01, c), mom);
          scatter_mass(*mat, e, e00, e01, e11);
        }
      }
      // stiffness: int eta dx times the constant gradients
      double eta_int;
      if (form_k.smooth) {
        const std::vector<double> c = smooth_coeffs(form_k, xl, h);
        const std::vector<double> mom = elemquad::local_moments(xl, xr, 0.0, 0, static_cast<int>(c.size()) - 1);
        eta_int = elemquad::integrate(c, mom);
      } else {
        eta_int = h;
      }
      scatter_mass(out.k_mat, e, eta_int / (h * h), -eta_int / (h * h), eta_int / (h * h));
      scatter_mass(out.k0_mat, e, 1.0 / h, -1.0 / h, 1.0 / h);
    } catch (const Error& err) {
      throw NumericalError("assembly failed on element " + std::to_string(e) + " [" + fmt(xl) +
                           ", " + fmt(xr) + "]: " + err.what());
    }
    for (int i = std::max(0, e - 1); i <= std::min(e, n - 1); ++i) {
      for (const SymTridiag* mat : {&out.b_mat, &out.k_mat, &out.s_mat}) {
        if (!std::isfinite(mat->diag(i))) {
          throw NumericalError("non-finite element integral on element " + std::to_string(e));
        }
      }
    }
  }
  return out;
}

}  // namespace degwave
