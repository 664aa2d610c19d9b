#include "ymh/fuchsian.hpp"

#include <algorithm>
#include <cmath>

namespace ymh {

namespace {

double dist_point_segment(cplx p, cplx a, cplx b) {
    const cplx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p - a).real() * d.real() + (p - a).imag() * d.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                 e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct State {
    Mat2 Y;
    cplx w;  // running integral of tr(coefficient) dz
};

State axpy(const State& s, double a, const State& d) {
    return {s.Y + a * d.Y, s.w + a * d.w};
}

}  // namespace

Mat2 FuchsianSystem::coefficient(cplx z) const {
    Mat2 m = Mat2::Zero();
    for (size_t k = 0; k < poles.size(); ++k) m += residues[k] / (z - poles[k]);
    if (twist) m += twist(z) * Mat2::Identity();
    return m;
}

cplx FuchsianSystem::trace_coefficient(cplx z) const {
    cplx t{0.0, 0.0};
    for (size_t k = 0; k < poles.size(); ++k)
        t += residues[k].trace() / (z - poles[k]);
    if (twist) t += 2.0 * twist(z);
    return t;
}

Mat2 FuchsianSystem::residue_sum() const {
    Mat2 s = Mat2::Zero();
    for (const Mat2& a : residues) s += a;
    return s;
}

double FuchsianSystem::min_pole_distance() const {
    double d = 1e300;
    for (size_t i = 0; i < poles.size(); ++i)
        for (size_t j = i + 1; j < poles.size(); ++j)
            d = std::min(d, std::abs(poles[i] - poles[j]));
    return poles.size() > 1 ? d : 1.0;
}

void FuchsianSystem::validate() const {
    if (poles.size() != residues.size())
        throw ConfigInvalid("pole/residue count mismatch");
}

void ContinuationPath::validate(const FuchsianSystem& sys) const {
    const double guard =
        guard_radius > 0 ? guard_radius : 0.1 * sys.min_pole_distance();
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        for (const cplx& p : sys.poles)
            if (dist_point_segment(p, pts[i], pts[i + 1]) < guard)
                throw PathThroughSingularity(
                    "continuation path within guard radius of a pole");
}

ContinuationPath ContinuationPath::loop_around(cplx center, double radius,
                                               cplx basepoint, int n_arc,
                                               bool clockwise) {
    ContinuationPath p;
    cplx dir = basepoint - center;
    if (std::abs(dir) < 1e-14) dir = 1.0;
    dir /= std::abs(dir);
    const cplx entry = center + radius * dir;
    p.pts.push_back(basepoint);
    p.pts.push_back(entry);
    const double phi0 = std::arg(dir);
    const double sgn = clockwise ? -1.0 : 1.0;
    for (int j = 1; j <= n_arc; ++j) {
        const double phi = phi0 + sgn * 2.0 * pi * j / n_arc;
        p.pts.push_back(center + radius * std::exp(iu * phi));
    }
    p.pts.push_back(basepoint);
    return p;
}

ContinuationPath ContinuationPath::segment(cplx a, cplx b) {
    return {{a, b}, 0.0};
}

IntegrateResult integrate(const FuchsianSystem& sys,
                          const ContinuationPath& path, const Mat2& Y0,
                          double tol) {
    sys.validate();
    if (tol <= 0) throw ConfigInvalid("tol must be positive");
    path.validate(sys);

    State s{Y0, {0.0, 0.0}};
    long steps = 0;
    const long max_steps = 2'000'000;

    for (size_t seg = 0; seg + 1 < path.pts.size(); ++seg) {
        const cplx za = path.pts[seg], zb = path.pts[seg + 1];
        const cplx d = zb - za;
        if (std::abs(d) == 0.0) continue;
        auto f = [&](double t, const State& st) -> State {
            const cplx z = za + t * d;
            return {d * (sys.coefficient(z) * st.Y), d * sys.trace_coefficient(z)};
        };
        double t = 0.0, h = 0.1;
        State k1 = f(t, s);
        while (t < 1.0) {
            h = std::min(h, 1.0 - t);
            const State k2 = f(t + c2 * h, axpy(s, h * a21, k1));
            const State k3 =
                f(t + c3 * h, axpy(axpy(s, h * a31, k1), h * a32, k2));
            const State k4 = f(
                t + c4 * h,
                axpy(axpy(axpy(s, h * a41, k1), h * a42, k2), h * a43, k3));
            const State k5 =
                f(t + c5 * h, axpy(axpy(axpy(axpy(s, h * a51, k1), h * a52, k2),
                                        h * a53, k3),
                                   h * a54, k4));
            const State k6 =
                f(t + h, axpy(axpy(axpy(axpy(axpy(s, h * a61, k1), h * a62, k2),
                                        h * a63, k3),
                                   h * a64, k4),
                              h * a65, k5));
            State y5 = s;
            y5.Y +=
                h * (b1 * k1.Y + b3 * k3.Y + b4 * k4.Y + b5 * k5.Y + b6 * k6.Y);
            y5.w +=
                h * (b1 * k1.w + b3 * k3.w + b4 * k4.w + b5 * k5.w + b6 * k6.w);
            const State k7 = f(t + h, y5);

            const Mat2 errY = h * (e1 * k1.Y + e3 * k3.Y + e4 * k4.Y +
                                   e5 * k5.Y + e6 * k6.Y + e7 * k7.Y);
            const cplx errw = h * (e1 * k1.w + e3 * k3.w + e4 * k4.w +
                                   e5 * k5.w + e6 * k6.w + e7 * k7.w);
            double err = 0.0;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    err = std::max(err, std::abs(errY(r, c)) /
                                            (tol + tol * std::abs(y5.Y(r, c))));
            err = std::max(err, std::abs(errw) / (tol + tol * std::abs(y5.w)));

            if (err <= 1.0) {
                t += h;
                s = y5;
                k1 = k7;  // FSAL
            }
            const double fac =
                std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
            h *= fac;
            if (h < 1e-13)
                throw StepUnderflow("step size underflow near a singularity");
            if (++steps > max_steps)
                throw TolNotMet("integration exceeded the step budget");
        }
    }

    const cplx det_expected = Y0.determinant() * std::exp(s.w);
    const double wdef = std::abs(s.Y.determinant() - det_expected) /
                        std::max(1e-300, std::abs(det_expected));
    return {s.Y, wdef, steps};
}

MonodromyRep monodromy_from_loops(const FuchsianSystem& sys, cplx basepoint,
                                  std::span<const ContinuationPath> loops,
                                  double tol) {
    if (loops.size() != 4) throw ConfigInvalid("need exactly 4 loops");
    MonodromyRep rep;
    rep.basepoint = basepoint;
    for (int i = 0; i < 4; ++i) {
        rep.rho[i] = integrate(sys, loops[i], Mat2::Identity(), tol).Y;
        rep.det_defect[i] = std::abs(rep.rho[i].determinant() - 1.0);
    }
    const Mat2 fwd = rep.rho[0] * rep.rho[1] * rep.rho[2] * rep.rho[3];
    const Mat2 rev = rep.rho[3] * rep.rho[2] * rep.rho[1] * rep.rho[0];
    const Mat2 id = Mat2::Identity();
    double best = 1e300;
    for (int sign : {+1, -1}) {
        const double df = frobenius(fwd - double(sign) * id);
        const double dr = frobenius(rev - double(sign) * id);
        if (df < best) {
            best = df;
            rep.product_sign = sign;
            rep.order_reversed = false;
        }
        if (dr < best) {
            best = dr;
            rep.product_sign = sign;
            rep.order_reversed = true;
        }
    }
    rep.product_defect = best;
    const Mat2 p123 = rep.order_reversed ? rep.rho[2] * rep.rho[1] * rep.rho[0]
                                         : rep.rho[0] * rep.rho[1] * rep.rho[2];
    rep.rho4_from_relation = double(rep.product_sign) * p123.inverse();
    return rep;
}

MonodromyRep monodromy_generators(const FuchsianSystem& sys, cplx basepoint,
                                  double tol) {
    sys.validate();
    if (sys.poles.size() != 3)
        throw ConfigInvalid("standard generators expect three finite poles");
    const double dmin = sys.min_pole_distance();
    std::vector<ContinuationPath> loops;
    for (const cplx& p : sys.poles) {
        const double R = std::min(0.35 * dmin, 0.5 * std::abs(p - basepoint));
        loops.push_back(ContinuationPath::loop_around(p, R, basepoint));
    }
    // loop around infinity: a large clockwise circle containing everything
    cplx far{0.0, 0.0};
    for (const cplx& p : sys.poles) far += p;
    far /= 3.0;
    double R = std::abs(basepoint - far);
    for (const cplx& p : sys.poles) R = std::max(R, std::abs(p - far));
    loops.push_back(
        ContinuationPath::loop_around(far, 2.5 * R, basepoint, 96, true));
    return monodromy_from_loops(sys, basepoint, loops, tol);
}

Mat2 residues_from_solution(const std::function<Mat2(double)>& sampler,
                            cplx /*pole*/, double /*radius*/, int n_nodes,
                            double fd_h) {
    const double dth = 2.0 * pi / n_nodes;
    Mat2 acc = Mat2::Zero();
    for (int j = 0; j < n_nodes; ++j) {
        const double th = j * dth;
        const Mat2 Y = sampler(th);
        const double scale = Y.cwiseAbs().maxCoeff();
        if (std::abs(Y.determinant()) < 1e-12 * scale * scale)
            throw SingularSolutionMatrix("solution matrix singular on contour");
        const Mat2 dY = (sampler(th + fd_h) - sampler(th - fd_h)) / (2.0 * fd_h);
        acc += dY * Y.inverse();
    }
    return acc * dth / (2.0 * pi * iu);
}

NonparabolicReport check_nonparabolic_form(const MonodromyRep& rep) {
    NonparabolicReport out;
    const Mat2 ga = rep.rho[0] * rep.rho[1];
    const Mat2 gb = rep.rho[1] * rep.rho[2];
    out.commute_defect = frobenius(ga * gb - gb * ga);

    auto near_pm_identity = [](const Mat2& g) {
        const Mat2 id = Mat2::Identity();
        return std::min(frobenius(g - id), frobenius(g + id)) < 1e-8;
    };
    Mat2 g = ga;
    if (near_pm_identity(g)) g = gb;
    if (near_pm_identity(g)) {
        out.degenerate = true;
        out.conjugator = Mat2::Identity();
        return out;
    }

    Eigen::ComplexEigenSolver<Mat2> es(g);
    const cplx l0 = es.eigenvalues()(0), l1 = es.eigenvalues()(1);
    if (std::abs(l0 - l1) < 1e-8 * std::max(1.0, std::abs(l0))) {
        out.parabolic = true;  // repeated eigenvalue, not +-identity
        out.conjugator = Mat2::Identity();
        return out;
    }
    const Mat2 V = es.eigenvectors();
    out.conjugator = V;
    const Mat2 Vi = V.inverse();

    for (const Mat2& w : {ga, gb}) {
        const Mat2 D = Vi * w * V;
        out.diag_defect =
            std::max({out.diag_defect, std::abs(D(0, 1)), std::abs(D(1, 0))});
    }
    for (int i = 0; i < 4; ++i) {
        const Mat2 B = Vi * rep.rho[i] * V;
        const double scale = B.cwiseAbs().maxCoeff();
        const double d = std::max({std::abs(B(0, 0)), std::abs(B(1, 1)),
                                   std::abs(B(0, 1) * B(1, 0) + 1.0)}) /
                         std::max(1.0, scale);
        out.antidiag_defect = std::max(out.antidiag_defect, d);
    }
    return out;
}

FuchsianSystem infinity_chart(const FuchsianSystem& sys) {
    sys.validate();
    if (sys.twist)
        throw ConfigInvalid("infinity chart only defined for twist-free systems");
    FuchsianSystem out;
    out.poles.push_back(0.0);
    out.residues.push_back(-sys.residue_sum());
    for (size_t k = 0; k < sys.poles.size(); ++k) {
        if (std::abs(sys.poles[k]) < 1e-12)
            throw ConfigInvalid(
                "pole at the origin: chart would place it at infinity");
        out.poles.push_back(1.0 / sys.poles[k]);
        out.residues.push_back(sys.residues[k]);
    }
    return out;
}

}  // namespace ymh
