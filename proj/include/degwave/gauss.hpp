#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace degwave {

/// Gauss-Legendre rule mapped to the reference interval [0,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule with n points, n in {2,3,4,5,6,8,12}.  Exact for polynomials of
/// degree 2n-1 on [0,1].
const GaussRule& gauss_rule(int n);

/// Coefficients (in the monomial basis of the reference coordinate u) of
/// the polynomial of degree n-1 interpolating the samples at the n-point
/// Gauss nodes.  Used to factor a smooth function out of a weighted
/// element integral.
std::vector<double> gauss_interp_coeffs(std::span<const double> samples, int n);

}  // namespace degwave
