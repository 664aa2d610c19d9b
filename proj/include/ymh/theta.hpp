#pragma once

#include "ymh/types.hpp"

namespace ymh {

// Real theta characteristics (delta, epsilon). Reduction mod 1 changes the
// value only by an explicit exponential factor; values are stored as given.
struct ThetaCharacteristics {
    double delta = 0.0;
    double epsilon = 0.0;
};

// theta[d,e](u; tau) = sum_n exp(i pi tau (n+d)^2 + 2 pi i (u+e)(n+d)).
// Symmetric truncation window around the peak term with an explicit tail
// bound below tol; deterministic for fixed inputs.
cplx theta(cplx u, cplx tau, const ThetaCharacteristics& ch = {},
           double tol = 1e-14);

// d/du of the series above.
cplx theta_du(cplx u, cplx tau, const ThetaCharacteristics& ch = {},
              double tol = 1e-14);

// Automorphy defects:
//   defect1 = |theta(u+1)   - e^{2 pi i d} theta(u)|
//   defect2 = |theta(u+tau) - e^{-2 pi i e} e^{-2 pi i u} e^{-i pi tau} theta(u)|
// The u+tau multiplier is the factor re-derived from the defining series.
std::pair<double, double> check_automorphy(cplx u, cplx tau,
                                           const ThetaCharacteristics& ch);

// Zero of theta[0,0](.; tau) in the fundamental cell, found by Newton from
// (1+tau)/2. Residual below 1e-12 or NewtonDiverged.
cplx locate_theta_zero(cplx tau);

// Argument-principle count of zeros of theta[0,0] in one fundamental cell
// (contour offset to keep zeros away from the boundary).
int theta_zero_count_in_cell(cplx tau);

}  // namespace ymh
