#pragma once

#include <functional>

#include "ymh/types.hpp"

namespace ymh {

// Adaptive Gauss-Kronrod (G7/K15) for complex-valued integrands on a real
// interval. The error estimate is the usual |K15 - G7| per panel.
cplx integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                  double tol, int max_depth = 48);

// Trapezoid rule with interval doubling for smooth periodic integrands over
// [0, 2*pi). Exponentially convergent on analytic contours.
cplx integrate_periodic(const std::function<cplx(double)>& f, double tol,
                        int n0 = 32, int n_max = 1 << 20);

}  // namespace ymh
