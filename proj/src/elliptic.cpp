#include "ymh/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "ymh/quadrature.hpp"

namespace ymh {

namespace {

double cross2(cplx a, cplx b) {
    return a.real() * b.imag() - a.imag() * b.real();
}

double dist_point_segment(cplx p, cplx a, cplx b) {
    const cplx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p - a).real() * d.real() + (p - a).imag() * d.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

double dist_point_ray(cplx p, cplx base, cplx dir, double t_max = 1e12) {
    double t = ((p - base).real() * dir.real() + (p - base).imag() * dir.imag());
    t = std::clamp(t, 0.0, t_max);
    return std::abs(p - (base + t * dir));
}

// Crossing of [a,b] with the parametric line q + s*d, s in (0, s_max).
// Appends the segment parameter t when a transversal interior crossing exists.
void segment_line_crossing(cplx a, cplx b, cplx q, cplx d, double s_max,
                           std::vector<double>& out) {
    const cplx u = b - a;
    const double den = cross2(u, d);
    const double scale = std::abs(u) * std::abs(d);
    if (std::abs(den) < 1e-14 * scale) return;  // parallel or degenerate
    const cplx w = q - a;
    const double t = cross2(w, d) / den;
    const double s = cross2(w, u) / den;
    if (t > 0.0 && t < 1.0 && s > 0.0 && s < s_max) out.push_back(t);
}

}  // namespace

void BranchPoints::validate() const {
    const cplx zs[3] = {z1, z2, z3};
    for (const cplx& z : zs)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ConfigInvalid("branch points must be finite");
    const double scale = std::max({std::abs(z1), std::abs(z2), std::abs(z3), 1.0});
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(zs[i] - zs[j]) < 1e-12 * scale)
                throw ConfigInvalid("branch points must be pairwise distinct");
}

double BranchPoints::min_pairwise_distance() const {
    return std::min({std::abs(z1 - z2), std::abs(z2 - z3), std::abs(z1 - z3)});
}

cplx BranchPoints::at(int k) const {
    switch (k) {
        case 0: return z1;
        case 1: return z2;
        default: return z3;
    }
}

MetricScale make_metric_scale(double r, const PeriodLattice& lat) {
    if (r <= 0.0) throw ConfigInvalid("metric scale r must be positive");
    MetricScale m;
    m.r = r;
    m.area_C = r * lat.tau.imag();
    m.area_Sigma = 0.5 * m.area_C;
    return m;
}

CutGeometry CutGeometry::from(const BranchPoints& bp) {
    bp.validate();
    CutGeometry c;
    c.z1 = bp.z1;
    c.z2 = bp.z2;
    c.z3 = bp.z3;
    c.ray_dir = (bp.z3 - bp.z2) / std::abs(bp.z3 - bp.z2);
    c.mu3 = iu * std::sqrt(c.ray_dir);
    return c;
}

cplx CutGeometry::f12_quarter(cplx z) const {
    return std::exp(0.25 * std::log((z - z1) / (z - z2)));
}

cplx CutGeometry::f3_quarter(cplx z) const {
    return std::exp(0.25 * std::log(-(z - z3) / ray_dir));
}

cplx CutGeometry::sqrt12(cplx z) const {
    const cplx q = f12_quarter(z);
    return (z - z2) * q * q;
}

cplx CutGeometry::sqrt3(cplx z) const {
    const cplx q = f3_quarter(z);
    return mu3 * q * q;
}

cplx CutGeometry::y1(cplx z) const { return sqrt12(z) * sqrt3(z); }

std::vector<double> CutGeometry::segment_crossings(cplx a, cplx b,
                                                   double guard) const {
    std::vector<double> out;
    segment_line_crossing(a, b, z1, z2 - z1, 1.0, out);
    segment_line_crossing(a, b, z3, ray_dir, 1e12, out);
    std::sort(out.begin(), out.end());
    // a crossing essentially at a branch point means the path grazes it
    for (double t : out) {
        const cplx zc = a + t * (b - a);
        if (std::abs(zc - z1) < guard || std::abs(zc - z2) < guard ||
            std::abs(zc - z3) < guard)
            throw PathThroughSingularity("path crosses a cut at a branch point");
    }
    return out;
}

std::vector<double> CutGeometry::circle_crossings(cplx c, double R,
                                                  double guard) const {
    std::vector<double> out;
    auto add_line = [&](cplx q, cplx d, double s_max) {
        // |q + s d - c|^2 = R^2, d unit-normalized by caller convention
        const cplx w = q - c;
        const double A = std::norm(d);
        const double B = 2.0 * (w.real() * d.real() + w.imag() * d.imag());
        const double C = std::norm(w) - R * R;
        const double disc = B * B - 4.0 * A * C;
        if (disc <= 0.0) return;
        const double sq = std::sqrt(disc);
        for (double s : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)}) {
            if (s <= 0.0 || s >= s_max) continue;
            const cplx p = q + s * d;
            double ang = std::arg(p - c);
            if (ang < 0) ang += 2 * pi;
            out.push_back(ang);
        }
    };
    add_line(z1, z2 - z1, 1.0);
    add_line(z3, ray_dir, 1e12);
    std::sort(out.begin(), out.end());
    for (double ang : out) {
        const cplx p = c + R * std::exp(iu * ang);
        if (std::abs(p - z1) < guard || std::abs(p - z2) < guard ||
            std::abs(p - z3) < guard)
            throw PathThroughSingularity("contour crosses a cut at a branch point");
    }
    return out;
}

double CutGeometry::distance_to_cuts(cplx z) const {
    return std::min(dist_point_segment(z, z1, z2), dist_point_ray(z, z3, ray_dir));
}

cplx CutGeometry::nearest_point_on_cuts(cplx z) const {
    auto proj_segment = [&](cplx a, cplx b) {
        const cplx d = b - a;
        double t = ((z - a).real() * d.real() + (z - a).imag() * d.imag()) /
                   std::norm(d);
        t = std::clamp(t, 0.0, 1.0);
        return a + t * d;
    };
    const cplx p1 = proj_segment(z1, z2);
    double t = (z - z3).real() * ray_dir.real() + (z - z3).imag() * ray_dir.imag();
    t = std::clamp(t, 0.0, 1e12);
    const cplx p2 = z3 + t * ray_dir;
    return std::abs(z - p1) <= std::abs(z - p2) ? p1 : p2;
}

CurveIntegrator::CurveIntegrator(const BranchPoints& bp, double guard_rel)
    : bp_(bp), cuts_(CutGeometry::from(bp)),
      guard_(guard_rel * bp.min_pairwise_distance()) {}

cplx CurveIntegrator::y_on_sheet(cplx z, int sheet) const {
    const cplx y = cuts_.y1(z);
    return sheet == 1 ? y : -y;
}

CurveIntegrator::PathResult CurveIntegrator::integrate_phi(
    std::span<const cplx> polyline, int sheet, double tol) const {
    cplx total{0.0, 0.0};
    int crossings = 0;
    double sign = (sheet == 1) ? 1.0 : -1.0;
    for (size_t i = 0; i + 1 < polyline.size(); ++i) {
        const cplx a = polyline[i], b = polyline[i + 1];
        for (int k = 0; k < 3; ++k)
            if (dist_point_segment(bp_.at(k), a, b) < guard_)
                throw PathThroughSingularity(
                    "path segment within guard radius of a branch point");
        std::vector<double> ts = cuts_.segment_crossings(a, b, guard_);
        ts.push_back(1.0);
        double t0 = 0.0;
        const cplx d = b - a;
        const double seg_tol = tol / static_cast<double>(polyline.size());
        for (double t1 : ts) {
            if (t1 > t0) {
                const double s = sign;
                total += integrate_gk(
                    [&, s](double t) { return d / (s * cuts_.y1(a + t * d)); },
                    t0, t1, seg_tol);
            }
            if (t1 < 1.0) {
                sign = -sign;
                ++crossings;
            }
            t0 = t1;
        }
    }
    return {total, sign > 0 ? 1 : 2, crossings};
}

cplx CurveIntegrator::integrate_phi_to_branch(cplx from, int k, int sheet,
                                              double tol) const {
    const cplx zk = bp_.at(k);
    const cplx d = from - zk;  // z(s) = zk + (1-s)^2 d runs from `from` into zk
    // no crossings allowed on the approach leg
    std::vector<double> ts =
        cuts_.segment_crossings(from, zk + 0.001 * d, guard_);
    if (!ts.empty())
        throw PathThroughSingularity("branch-point approach crosses a cut");
    for (int j = 0; j < 3; ++j) {
        if (j == k) continue;
        if (dist_point_segment(bp_.at(j), from, zk) < guard_)
            throw PathThroughSingularity("branch-point approach grazes another");
    }
    const double sign = (sheet == 1) ? 1.0 : -1.0;
    // z = zk + (1-s)^2 d, s in [0,1]: dz = -2(1-s) d ds and y ~ (1-s), so the
    // integrand is smooth up to the endpoint.
    return integrate_gk(
        [&](double s) {
            const double m = 1.0 - s;
            const cplx z = zk + (m * m) * d;
            return -2.0 * m * d / (sign * cuts_.y1(z));
        },
        0.0, 1.0, tol);
}

CurveIntegrator::PathResult CurveIntegrator::integrate_phi_circle(
    cplx c, double R, double angle0, int sheet, double tol) const {
    for (int k = 0; k < 3; ++k)
        if (std::abs(std::abs(bp_.at(k) - c) - R) < guard_)
            throw PathThroughSingularity("contour within guard of a branch point");
    std::vector<double> angs = cuts_.circle_crossings(c, R, guard_);
    // arc breakpoints relative to angle0, ascending in (0, 2pi]
    std::vector<double> brk;
    for (double a : angs) {
        double rel = a - angle0;
        while (rel <= 0) rel += 2 * pi;
        while (rel > 2 * pi) rel -= 2 * pi;
        if (rel < 1e-10 || rel > 2 * pi - 1e-10)
            throw PathThroughSingularity("contour starts on a cut");
        brk.push_back(rel);
    }
    std::sort(brk.begin(), brk.end());
    brk.push_back(2 * pi);
    cplx total{0.0, 0.0};
    double sign = (sheet == 1) ? 1.0 : -1.0;
    int crossings = 0;
    double t0 = 0.0;
    for (double t1 : brk) {
        if (t1 > t0 + 1e-15) {
            const double s = sign;
            total += integrate_gk(
                [&, s](double t) {
                    const cplx z = c + R * std::exp(iu * (angle0 + t));
                    return iu * R * std::exp(iu * (angle0 + t)) / (s * cuts_.y1(z));
                },
                t0, t1, tol);
        }
        if (t1 < 2 * pi) {
            sign = -sign;
            ++crossings;
        }
        t0 = t1;
    }
    return {total, sign > 0 ? 1 : 2, crossings};
}

PeriodLattice compute_periods(const BranchPoints& bp, double quad_tol) {
    bp.validate();
    if (quad_tol <= 0) throw ConfigInvalid("quad_tol must be positive");
    CurveIntegrator integ(bp);

    auto cycle = [&](cplx p, cplx q, cplx other) {
        const cplx c = 0.5 * (p + q);
        const double r_in = 0.5 * std::abs(p - q);
        const double r_out = std::abs(other - c);
        if (r_out < 1.30 * r_in)
            throw DegenerateLattice("branch points too crowded for circular cycles");
        const double R = r_in + 0.5 * (r_out - r_in);
        // generic start angles so the contour never begins on a cut
        for (double angle0 : {0.2371, 1.1613, 2.0489, 2.9611}) {
            try {
                const auto res = integ.integrate_phi_circle(c, R, angle0, 1, quad_tol);
                if (res.end_sheet != 1)
                    throw NumericalError("cycle contour did not close on the curve");
                return res.integral;
            } catch (const PathThroughSingularity&) {
                continue;
            }
        }
        throw PathThroughSingularity("no valid start angle for cycle contour");
    };

    PeriodLattice lat;
    lat.omega1 = cycle(bp.z1, bp.z2, bp.z3);  // a-cycle around {z1,z2}
    lat.omega2 = cycle(bp.z2, bp.z3, bp.z1);  // b-cycle around {z2,z3}
    cplx tau = lat.omega2 / lat.omega1;
    if (std::abs(tau.imag()) < 1e-12)
        throw DegenerateLattice("period ratio is real");
    if (tau.imag() < 0) {
        lat.omega2 = -lat.omega2;
        tau = -tau;
    }
    lat.tau = tau;
    return lat;
}

cplx abel_map(const CurvePoint& p, const CurvePoint& basepoint,
              const PeriodLattice& lat, const CurveIntegrator& integ,
              double tol, std::span<const cplx> waypoints) {
    std::vector<cplx> path;
    path.push_back(basepoint.z);
    path.insert(path.end(), waypoints.begin(), waypoints.end());
    path.push_back(p.z);
    auto res = integ.integrate_phi(path, basepoint.sheet, tol);
    cplx total = res.integral;
    if (res.end_sheet != p.sheet) {
        // append an excursion: out to a small circle around z1 and back,
        // which crosses [z1,z2] once and flips the sheet
        const BranchPoints& bp = integ.branch_points();
        const double R_e =
            0.4 * std::min(std::abs(bp.z1 - bp.z2), std::abs(bp.z1 - bp.z3));
        cplx dir = p.z - bp.z1;
        if (std::abs(dir) < 1e-12) dir = cplx{1.0, 0.0};
        dir /= std::abs(dir);
        const cplx entry = bp.z1 + R_e * dir;
        const cplx leg[2] = {p.z, entry};
        auto out = integ.integrate_phi(leg, res.end_sheet, tol);
        auto loop = integ.integrate_phi_circle(bp.z1, R_e, std::arg(dir),
                                               out.end_sheet, tol);
        const cplx back[2] = {entry, p.z};
        auto ret = integ.integrate_phi(back, loop.end_sheet, tol);
        if (ret.end_sheet != p.sheet)
            throw NumericalError("sheet correction failed");
        total += out.integral + loop.integral + ret.integral;
    }
    return total / lat.omega1;
}

cplx reduce_mod_lattice(cplx u, cplx tau) {
    const double n0 = u.imag() / tau.imag();
    const double m0 = u.real() - n0 * tau.real();
    cplx best = u;
    for (int dm = -1; dm <= 1; ++dm)
        for (int dn = -1; dn <= 1; ++dn) {
            const double m = std::round(m0) + dm, n = std::round(n0) + dn;
            const cplx cand = u - m - n * tau;
            if (std::abs(cand) < std::abs(best)) best = cand;
        }
    return best;
}

WeierstrassP::WeierstrassP(cplx tau) : tau_(tau) {
    if (tau.imag() <= 0) throw InvalidModulus("Im(tau) must be positive");
    const cplx q2 = std::exp(2.0 * iu * pi * tau);
    cplx e4{1.0, 0.0}, e6{1.0, 0.0};
    cplx qn = q2;
    for (int n = 1; n <= 400; ++n) {
        const double nd = n;
        const cplx t4 = 240.0 * nd * nd * nd * qn / (1.0 - qn);
        const cplx t6 = -504.0 * nd * nd * nd * nd * nd * qn / (1.0 - qn);
        e4 += t4;
        e6 += t6;
        if (std::abs(t4) + std::abs(t6) < 1e-18) break;
        qn *= q2;
    }
    const double pi4 = pi * pi * pi * pi;
    g2 = (4.0 * pi4 / 3.0) * e4;
    g3 = (8.0 * pi4 * pi * pi / 27.0) * e6;

    r_min_ = 1e300;
    for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n) {
            if (m == 0 && n == 0) continue;
            r_min_ = std::min(r_min_, std::abs(double(m) + double(n) * tau));
        }

    coeff_.assign(20, cplx{0.0, 0.0});
    coeff_[2] = g2 / 20.0;
    coeff_[3] = g3 / 28.0;
    for (size_t k = 4; k < coeff_.size(); ++k) {
        cplx s{0.0, 0.0};
        for (size_t m = 2; m <= k - 2; ++m) s += coeff_[m] * coeff_[k - m];
        coeff_[k] = 3.0 * s / ((2.0 * k + 1.0) * (k - 3.0));
    }
}

std::pair<cplx, cplx> WeierstrassP::value_and_derivative(cplx u) const {
    u = reduce_mod_lattice(u, tau_);
    if (std::abs(u) < 1e-140) return {cplx{1e280, 0.0}, cplx{-1e300, 0.0}};
    int halvings = 0;
    while (std::abs(u) > 0.24 * r_min_) {
        u *= 0.5;
        ++halvings;
    }
    const cplx u2 = u * u;
    cplx p = 1.0 / u2, dp = -2.0 / (u2 * u);
    cplx upow = u2;  // u^{2k-2} for k=2
    for (size_t k = 2; k < coeff_.size(); ++k) {
        p += coeff_[k] * upow;
        dp += (2.0 * k - 2.0) * coeff_[k] * upow / u;
        upow *= u2;
    }
    for (int j = 0; j < halvings; ++j) {
        const cplx x = p, d = dp;
        const cplx A = 6.0 * x * x - 0.5 * g2;
        const cplx B = d * d;  // = 4x^3 - g2 x - g3
        const cplx Bp = 12.0 * x * x - g2;
        p = -2.0 * x + A * A / (4.0 * B);
        const cplx dPdx = -2.0 + (2.0 * A * 12.0 * x * B - A * A * Bp) / (4.0 * B * B);
        dp = 0.5 * dPdx * d;
    }
    return {p, dp};
}

cplx WeierstrassP::operator()(cplx u) const {
    return value_and_derivative(u).first;
}

cplx covering_map(cplx u, const PeriodLattice& lat, const BranchPoints& bp,
                  const WeierstrassP& wp) {
    const cplx alpha = 4.0 / (lat.omega1 * lat.omega1);
    const cplx beta = (bp.z1 + bp.z2 + bp.z3) / 3.0;
    return alpha * wp(u) + beta;
}

}  // namespace ymh
