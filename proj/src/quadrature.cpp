#include "degwave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "degwave/errors.hpp"
#include "degwave/gauss.hpp"

namespace degwave {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol || depth <= 0) {
    if (depth <= 0 && !(std::abs(err) <= 15.0 * tol)) {
      throw IntegrabilityError("adaptive quadrature failed to converge on [" + std::to_string(a) +
                               ", " + std::to_string(b) + "] (error estimate " +
                               std::to_string(std::abs(err) / 15.0) + " > tol " +
                               std::to_string(tol) + ")");
    }
    return left + right + err / 15.0;
  }
  return adaptive_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
    throw IntegrabilityError("non-finite integrand sample on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
  }
  const double whole = simpson(fa, fm, fb, b - a);
  return sign * adaptive_rec(f, a, b, fa, fm, fb, whole, abs_tol, 48);
}

double integrate_toward_zero(const std::function<double(double)>& f, double a, double b,
                             double abs_tol) {
  if (!(a > 0.0) || !(b > a)) {
    throw std::invalid_argument("integrate_toward_zero requires 0 < a < b");
  }
  // Dyadic pieces [b/2^{k+1}, b/2^k]; on each the distance to the origin is
  // comparable to the piece width, so adaptive Simpson converges quickly.
  double total = 0.0;
  double hi = b;
  int pieces = 0;
  while (hi > 2.0 * a && pieces < 1100) {
    const double lo = 0.5 * hi;
    total += integrate_adaptive(f, lo, hi, abs_tol * 0.25 * (hi - lo) / b);
    hi = lo;
    ++pieces;
  }
  if (pieces >= 1100) {
    throw IntegrabilityError("integral toward 0 did not terminate (lower limit " +
                             std::to_string(a) + " too small)");
  }
  total += integrate_adaptive(f, a, hi, abs_tol * 0.25);
  return total;
}

namespace {

GaussRule make_rule(int n) {
  // Nodes/weights on [-1,1]; standard tables.
  static const std::map<int, std::pair<std::vector<double>, std::vector<double>>> table = {
      {2, {{0.5773502691896257645091488}, {1.0}}},
      {3, {{0.0, 0.7745966692414833770358531}, {0.8888888888888888888888889, 0.5555555555555555555555556}}},
      {4,
       {{0.3399810435848562648026658, 0.8611363115940525752239465},
        {0.6521451548625461426269361, 0.3478548451374538573730639}}},
      {5,
       {{0.0, 0.5384693101056830910363144, 0.9061798459386639927976269},
        {0.5688888888888888888888889, 0.4786286704993664680412915, 0.2369268850561890875142640}}},
      {6,
       {{0.2386191860831969086305017, 0.6612093864662645136613996, 0.9324695142031520278123016},
        {0.4679139345726910473898703, 0.3607615730481386075698335, 0.1713244923791703450402961}}},
      {8,
       {{0.1834346424956498049394761, 0.5255324099163289858177390, 0.7966664774136267395915539,
         0.9602898564975362316835609},
        {0.3626837833783619829651504, 0.3137066458778872873379622, 0.2223810344533744705443560,
         0.1012285362903762591525314}}},
      {12,
       {{0.1252334085114689154724414, 0.3678314989981801937526915, 0.5873179542866174472967024,
         0.7699026741943046870368938, 0.9041172563704748566784659, 0.9815606342467192506905491},
        {0.2491470458134027850005624, 0.2334925365383548087608499, 0.2031674267230659217490645,
         0.1600783285433462263346525, 0.1069393259953184309602547, 0.0471753363865118271946160}}},
  };
  auto it = table.find(n);
  if (it == table.end()) throw std::invalid_argument("unsupported Gauss rule size " + std::to_string(n));
  GaussRule r;
  const auto& [pos, w] = it->second;
  const bool has_center = (n % 2 == 1);
  // Map +-x to [0,1]: u = (1 + x)/2, weight halves.
  std::vector<std::pair<double, double>> pts;
  std::size_t start = has_center ? 1 : 0;
  if (has_center) pts.emplace_back(0.5, 0.5 * w[0]);
  for (std::size_t i = start; i < pos.size(); ++i) {
    pts.emplace_back(0.5 * (1.0 - pos[i]), 0.5 * w[i]);
    pts.emplace_back(0.5 * (1.0 + pos[i]), 0.5 * w[i]);
  }
  std::sort(pts.begin(), pts.end());
  for (auto& [u, wu] : pts) {
    r.nodes.push_back(u);
    r.weights.push_back(wu);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static const std::map<int, GaussRule> rules = [] {
    std::map<int, GaussRule> m;
    for (int k : {2, 3, 4, 5, 6, 8, 12}) m.emplace(k, make_rule(k));
    return m;
  }();
  auto it = rules.find(n);
  if (it == rules.end()) throw std::invalid_argument("unsupported Gauss rule size " + std::to_string(n));
  return it->second;
}

std::vector<double> gauss_interp_coeffs(std::span<const double> samples, int n) {
  const GaussRule& rule = gauss_rule(n);
  // Solve the n x n Vandermonde system V c = s with V_{gk} = u_g^k.
  // n <= 6 and the nodes live in (0,1), so plain elimination with partial
  // pivoting is accurate enough.
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
  for (int g = 0; g < n; ++g) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) {
      m[g][k] = p;
      p *= rule.nodes[g];
    }
    m[g][n] = samples[g];
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    for (int r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int k = col; k <= n; ++k) m[r][k] -= f * m[col][k];
    }
  }
  std::vector<double> c(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = m[r][n];
    for (int k = r + 1; k < n; ++k) s -= m[r][k] * c[k];
    c[r] = s / m[r][r];
  }
  return c;
}

}  // namespace degwave
