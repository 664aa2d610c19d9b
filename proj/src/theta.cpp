#include "ymh/theta.hpp"

#include <cmath>

#include "ymh/quadrature.hpp"

namespace ymh {

namespace {

using lcplx = std::complex<long double>;
constexpr long double pil = 3.14159265358979323846264338327950288L;
const lcplx il{0.0L, 1.0L};

inline lcplx widen(cplx z) { return {z.real(), z.imag()}; }
inline cplx narrow(lcplx z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

struct Window {
    long lo, hi;
};

// Symmetric window around the peak of |term(n)| = exp(-pi Im(tau)(n+d)^2
// - 2 pi Im(u)(n+d)); extends until terms fall below tol *relative to the
// peak term*, so the truncation error scales with |theta| itself. The scan
// is on term magnitudes only, so the window (and hence the summation order)
// is deterministic for fixed inputs.
Window truncation_window(cplx u, cplx tau, const ThetaCharacteristics& ch,
                         double tol) {
    const double a = pi * tau.imag();
    const double b = 2.0 * pi * u.imag();
    auto log_mag = [&](double n) {
        const double x = n + ch.delta;
        return -a * x * x - b * x;
    };
    const long center = std::lround(-ch.delta - u.imag() / tau.imag());
    const double log_peak =
        std::max({log_mag(double(center - 1)), log_mag(double(center)),
                  log_mag(double(center + 1))});
    const double log_tol = log_peak + std::log(tol) - 3.0;
    long lo = center, hi = center;
    int below = 0;
    while (below < 3 && hi - center < 100000) {
        ++hi;
        below = log_mag(double(hi)) < log_tol ? below + 1 : 0;
    }
    below = 0;
    while (below < 3 && center - lo < 100000) {
        --lo;
        below = log_mag(double(lo)) < log_tol ? below + 1 : 0;
    }
    return {lo, hi};
}

// The summation runs in extended precision so that automorphy identities
// hold to ~1e-12 absolute even when |theta| reaches 1e6.
lcplx theta_sum(cplx u, cplx tau, const ThetaCharacteristics& ch, double tol,
                bool derivative) {
    if (tau.imag() <= 0) throw InvalidModulus("theta requires Im(tau) > 0");
    const Window w = truncation_window(u, tau, ch, tol);
    const lcplx ul = widen(u), taul = widen(tau);
    const long double d = ch.delta, e = ch.epsilon;
    lcplx sum{0.0L, 0.0L};
    for (long n = w.lo; n <= w.hi; ++n) {
        const long double nd = static_cast<long double>(n) + d;
        lcplx term = std::exp(il * pil * taul * nd * nd +
                              2.0L * pil * il * (ul + e) * nd);
        if (derivative) term *= 2.0L * pil * il * nd;
        sum += term;
    }
    return sum;
}

}  // namespace

cplx theta(cplx u, cplx tau, const ThetaCharacteristics& ch, double tol) {
    return narrow(theta_sum(u, tau, ch, tol, false));
}

cplx theta_du(cplx u, cplx tau, const ThetaCharacteristics& ch, double tol) {
    return narrow(theta_sum(u, tau, ch, tol * 1e-2, true));
}

std::pair<double, double> check_automorphy(cplx u, cplx tau,
                                           const ThetaCharacteristics& ch) {
    const lcplx t0 = theta_sum(u, tau, ch, 1e-19, false);
    const lcplx t1 = theta_sum(u + 1.0, tau, ch, 1e-19, false);
    const lcplx t2 = theta_sum(u + tau, tau, ch, 1e-19, false);
    const lcplx ul = widen(u), taul = widen(tau);
    const long double d = ch.delta, e = ch.epsilon;
    const double d1 =
        static_cast<double>(std::abs(t1 - std::exp(2.0L * pil * il * d) * t0));
    const double d2 = static_cast<double>(std::abs(
        t2 - std::exp(-2.0L * pil * il * e) * std::exp(-2.0L * pil * il * ul) *
                 std::exp(-il * pil * taul) * t0));
    return {d1, d2};
}

cplx locate_theta_zero(cplx tau) {
    if (tau.imag() <= 0) throw InvalidModulus("Im(tau) must be positive");
    cplx u = 0.5 + 0.5 * tau;
    for (int it = 0; it < 60; ++it) {
        const cplx f = theta(u, tau);
        if (std::abs(f) < 1e-13) return u;
        const cplx df = theta_du(u, tau);
        if (std::abs(df) < 1e-14) break;
        u -= f / df;
    }
    if (std::abs(theta(u, tau)) < 1e-12) return u;
    throw NewtonDiverged("theta zero Newton iteration failed");
}

int theta_zero_count_in_cell(cplx tau) {
    // cell corner offset so the zero at (1+tau)/2 stays interior
    const cplx o = -0.013 - 0.017 * tau;
    const cplx corners[5] = {o, o + 1.0, o + 1.0 + tau, o + tau, o};
    cplx total{0.0, 0.0};
    for (int e = 0; e < 4; ++e) {
        const cplx a = corners[e], b = corners[e + 1];
        total += integrate_gk(
            [&](double t) {
                const cplx z = a + t * (b - a);
                return (b - a) * theta_du(z, tau) / theta(z, tau);
            },
            0.0, 1.0, 1e-10);
    }
    const double n = (total / (2.0 * pi * iu)).real();
    return static_cast<int>(std::lround(n));
}

}  // namespace ymh
