#pragma once

#include <vector>

namespace degwave {

/// Symmetric tridiagonal matrix in banded storage (bandwidth 1).
/// diag has n entries, off has n-1; off[i] couples rows i and i+1.
class SymTridiag {
public:
  SymTridiag() = default;
  explicit SymTridiag(int n) : diag_(n, 0.0), off_(n > 0 ? n - 1 : 0, 0.0) {}

  int size() const { return static_cast<int>(diag_.size()); }

  double& diag(int i) { return diag_[i]; }
  double diag(int i) const { return diag_[i]; }
  double& off(int i) { return off_[i]; }
  double off(int i) const { return off_[i]; }

  /// out = A u
  void multiply(const std::vector<double>& u, std::vector<double>& out) const;

  /// u^T A u
  double quad_form(const std::vector<double>& u) const;

  /// u^T A w
  double bilinear(const std::vector<double>& u, const std::vector<double>& w) const;

  /// this + c * other (same size)
  SymTridiag plus_scaled(const SymTridiag& other, double c) const;

private:
  std::vector<double> diag_;
  std::vector<double> off_;
};

/// LDL^T factorization of a symmetric positive definite tridiagonal matrix.
/// Construction throws NumericalError when a pivot is not strictly positive,
/// naming the row and pivot value.
class TridiagCholesky {
public:
  explicit TridiagCholesky(const SymTridiag& a);

  /// Solve A x = b in place.
  void solve(std::vector<double>& b) const;

  double min_pivot() const { return min_pivot_; }

private:
  std::vector<double> d_;  // pivots
  std::vector<double> l_;  // subdiagonal multipliers
  double min_pivot_;
};

}  // namespace degwave
