#pragma once

#include <functional>

namespace degwave {

/// Adaptive Simpson integration with an absolute tolerance.  Suitable for
/// integrands that are smooth on [a,b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol);

/// Integral over [a,b], 0 < a < b, of a function that may blow up (but stay
/// integrable) toward x = 0.  The interval is split into dyadic pieces
/// shrinking toward a so every piece sees a mildly varying integrand;
/// each piece is handled by adaptive Simpson.
double integrate_toward_zero(const std::function<double(double)>& f, double a, double b,
                             double abs_tol);

}  // namespace degwave
