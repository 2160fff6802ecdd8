#include "degwave/tridiag.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "degwave/errors.hpp"

namespace degwave {

void SymTridiag::multiply(const std::vector<double>& u, std::vector<double>& out) const {
  const int n = size();
  out.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = diag_[i] * u[i];
    if (i > 0) s += off_[i - 1] * u[i - 1];
    if (i + 1 < n) s += off_[i] * u[i + 1];
    out[i] = s;
  }
}

double SymTridiag::quad_form(const std::vector<double>& u) const {
  return bilinear(u, u);
}

double SymTridiag::bilinear(const std::vector<double>& u, const std::vector<double>& w) const {
  const int n = size();
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += diag_[i] * u[i] * w[i];
  for (int i = 0; i + 1 < n; ++i) s += off_[i] * (u[i] * w[i + 1] + u[i + 1] * w[i]);
  return s;
}

SymTridiag SymTridiag::plus_scaled(const SymTridiag& other, double c) const {
  SymTridiag r(size());
  for (int i = 0; i < size(); ++i) r.diag(i) = diag_[i] + c * other.diag(i);
  for (int i = 0; i + 1 < size(); ++i) r.off(i) = off_[i] + c * other.off(i);
  return r;
}

TridiagCholesky::TridiagCholesky(const SymTridiag& a) {
  const int n = a.size();
  d_.resize(n);
  l_.resize(n > 0 ? n - 1 : 0);
  min_pivot_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double di = a.diag(i);
    if (i > 0) di -= l_[i - 1] * l_[i - 1] * d_[i - 1];
    if (!(di > 0.0) || !std::isfinite(di)) {
      throw NumericalError("tridiagonal factorization failed: pivot " + std::to_string(di) +
                           " <= 0 at row " + std::to_string(i) + " (matrix not positive definite)");
    }
    d_[i] = di;
    min_pivot_ = std::min(min_pivot_, di);
    if (i + 1 < n) l_[i] = a.off(i) / di;
  }
}

void TridiagCholesky::solve(std::vector<double>& b) const {
  const int n = static_cast<int>(d_.size());
  for (int i = 1; i < n; ++i) b[i] -= l_[i - 1] * b[i - 1];
  for (int i = 0; i < n; ++i) b[i] /= d_[i];
  for (int i = n - 2; i >= 0; --i) b[i] -= l_[i] * b[i + 1];
}

}  // namespace degwave
