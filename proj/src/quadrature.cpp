#include "ymh/quadrature.hpp"

#include <array>
#include <cmath>

namespace ymh {

namespace {

// K15 nodes on [-1,1] and weights; G7 uses the odd-indexed nodes.
constexpr std::array<double, 15> kron_x = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

constexpr std::array<double, 15> kron_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

constexpr std::array<double, 7> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct Panel {
    cplx value;
    double err;
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx k{0.0, 0.0}, g{0.0, 0.0};
    for (int i = 0; i < 15; ++i) {
        const cplx fv = f(c + h * kron_x[i]);
        k += kron_w[i] * fv;
        if (i % 2 == 1) g += gauss_w[i / 2] * fv;
    }
    k *= h;
    g *= h;
    return {k, std::abs(k - g)};
}

cplx adapt(const std::function<cplx(double)>& f, double a, double b, double tol,
           int depth) {
    const Panel p = gk15(f, a, b);
    if (p.err <= tol || depth <= 0) {
        if (p.err > tol && depth <= 0)
            throw NonConvergentQuadrature("adaptive GK15 hit max depth");
        return p.value;
    }
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, depth - 1) +
           adapt(f, m, b, 0.5 * tol, depth - 1);
}

}  // namespace

cplx integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                  double tol, int max_depth) {
    if (a == b) return {0.0, 0.0};
    return adapt(f, a, b, tol, max_depth);
}

cplx integrate_periodic(const std::function<cplx(double)>& f, double tol,
                        int n0, int n_max) {
    int n = n0;
    const double period = 2.0 * pi;
    cplx prev{0.0, 0.0};
    double h = period / n;
    for (int j = 0; j < n; ++j) prev += f(j * h);
    prev *= h;
    while (n < n_max) {
        // refine by evaluating midpoints only
        cplx mid{0.0, 0.0};
        for (int j = 0; j < n; ++j) mid += f((j + 0.5) * h);
        const cplx next = 0.5 * prev + 0.5 * h * mid;
        n *= 2;
        h *= 0.5;
        if (std::abs(next - prev) < tol) return next;
        prev = next;
    }
    throw NonConvergentQuadrature("periodic trapezoid did not converge");
}

}  // namespace ymh
