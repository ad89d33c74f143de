#pragma once

// Thin wrappers over Boost's adaptive Gauss-Kronrod rule.

#include <functional>

namespace affint {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // Kronrod error estimate
};

// Adaptive 61-point Gauss-Kronrod on [a, b]; b may be +infinity.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                     unsigned max_depth = 15);

// Tanh-sinh on a finite [a, b]; tolerates integrable endpoint singularities.
QuadResult integrate_singular(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12);

// [a, b] cut into `panels` equal pieces, each integrated adaptively and
// summed in order. For oscillatory integrands.
QuadResult integrate_panels(const std::function<double(double)>& f, double a, double b, int panels,
                            double rel_tol = 1e-10);

}  // namespace affint
