#pragma once

#include <vector>

#include "degwave/coefficients.hpp"
#include "degwave/tridiag.hpp"

namespace degwave {

/// Graded mesh on [0,1] with nodes x_i = (i/N)^q.
struct Mesh {
  int n = 0;       ///< element count; nodes are 0..n
  double q = 1.0;  ///< grading exponent
  std::vector<double> nodes;

  double h(int e) const { return nodes[e + 1] - nodes[e]; }
};

/// Mesh graded by the degeneracy of a: q = max(1, 2/(2 - K_a)), clamped to [1,4].
Mesh build_mesh(int n, const CoefficientProfile& profile);

/// Mesh with an explicit grading exponent (q = 1 gives a uniform mesh).
Mesh build_mesh(int n, double q);

/// Exact moment  int_{x_l}^{x_r} x^{k-p} dx  with the logarithmic branch when
/// k - p + 1 = 0.  Requires x_l > 0 unless k - p + 1 > 0.
double singular_moment(double x_l, double x_r, double p, int k);

/// P1 stiffness/mass family on the graded mesh with the Dirichlet row and
/// column at x = 0 eliminated.  All matrices are symmetric tridiagonal of
/// size n (unknowns at nodes 1..n, boundary x = 1 unconstrained).
///   b_mat: int phi_i phi_j / sigma        k_mat:  int eta phi_i' phi_j'
///   k0_mat: int phi_i' phi_j'             s_mat:  int phi_i phi_j / (sigma d)
struct OperatorMatrices {
  SymTridiag b_mat, k_mat, k0_mat, s_mat;
  Mesh mesh;
};

struct AssemblyOptions {
  int quad_points = 4;  ///< Gauss points per element for the smooth factor (2..6)
  /// Run the smooth-factor interpolation path even when the drift vanishes
  /// (used by the quadrature consistency check).
  bool force_smooth_interp = false;
};

OperatorMatrices assemble(const CoefficientProfile& profile, const WeightPair& weights,
                          const Mesh& mesh, const AssemblyOptions& opts = {});

/// Per-element integrals of u-polynomials against a singular weight,
/// shared by the assembly and the multiplier diagnostics:
///   int_elem P(u) * s(x) * x^(-p) dx,  u = (x - x_l)/h.
namespace elemquad {

/// Moments m_k = int_elem u^k x^(-p) dx for k = 0..k_max (k_max <= 9).
/// Entries below k_min are not computed (left 0); elements away from the
/// origin fall back to a 12-point Gauss rule on the (there smooth) weight.
std::vector<double> local_moments(double x_l, double x_r, double p, int k_min, int k_max);

/// Convolution of polynomial coefficient arrays.
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b);

/// Dot product of a coefficient array with the matching moments.
double integrate(const std::vector<double>& coeffs, const std::vector<double>& moments);

}  // namespace elemquad

}  // namespace degwave
