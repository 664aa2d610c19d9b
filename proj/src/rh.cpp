#include "ymh/rh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <sstream>

#include "ymh/quadrature.hpp"

namespace ymh {

namespace {

const Mat2 kJump = [] {
    Mat2 j = Mat2::Zero();
    j(0, 1) = 1.0;
    j(1, 0) = -1.0;
    return j;
}();

double dist_point_segment(cplx p, cplx a, cplx b) {
    const cplx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p - a).real() * d.real() + (p - a).imag() * d.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

cplx unit_pow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// nearest fourth root of unity to `r`, as a power of i; throws if far off
int snap_unit(cplx r) {
    int best = 0;
    double dmin = 1e300;
    for (int k = 0; k < 4; ++k) {
        const double d = std::abs(r - unit_pow(k));
        if (d < dmin) {
            dmin = d;
            best = k;
        }
    }
    if (dmin > 2e-3)
        throw NumericalError("fourth-root branch tracking lost continuity");
    return best;
}

double sigma(int s) { return s == 0 ? 1.0 : -1.0; }

struct ConventionKey {
    double z1r, z1i, z2r, z2i, z3r, z3i, d, e, b0r, b0i;
    bool operator<(const ConventionKey& o) const {
        return std::tie(z1r, z1i, z2r, z2i, z3r, z3i, d, e, b0r, b0i) <
               std::tie(o.z1r, o.z1i, o.z2r, o.z2i, o.z3r, o.z3i, o.d, o.e,
                        o.b0r, o.b0i);
    }
};

std::map<ConventionKey, RhConvention>& convention_cache() {
    static std::map<ConventionKey, RhConvention> cache;
    return cache;
}
std::mutex cache_mutex;

}  // namespace

std::string RhConvention::describe() const {
    std::ostringstream os;
    for (int r = 0; r < 2; ++r) {
        os << "row" << r << ": num[" << row[r].num.delta << ","
           << row[r].num.epsilon << "]+(" << row[r].num_shift << ") den["
           << row[r].den.delta << "," << row[r].den.epsilon << "]+("
           << row[r].den_shift << ") ";
    }
    os << "side=" << jump_side_sign;
    return os.str();
}

ExplicitSolution::ExplicitSolution(RhConfig cfg)
    : cfg_(cfg), bp_(cfg.bp), integ_(cfg.bp, cfg.guard_rel),
      lat_(compute_periods(cfg.bp, cfg.quad_tol)), wp_(lat_.tau) {
    // documented default basepoint: below the midpoint of [z1,z2], on the
    // side away from the third branch point's cut
    if (cfg_.basepoint) {
        z0_ = *cfg_.basepoint;
    } else {
        const cplx m = 0.5 * (bp_.z1 + bp_.z2);
        const cplx n = iu * (bp_.z2 - bp_.z1) / std::abs(bp_.z2 - bp_.z1);
        const cplx cand1 = m - 0.9 * std::abs(bp_.z2 - bp_.z1) * n;
        const cplx cand2 = m + 0.9 * std::abs(bp_.z2 - bp_.z1) * n;
        z0_ = integ_.cuts().distance_to_cuts(cand1) >=
                      integ_.cuts().distance_to_cuts(cand2)
                  ? cand1
                  : cand2;
    }
    if (integ_.cuts().distance_to_cuts(z0_) < integ_.guard())
        throw ConfigInvalid("basepoint too close to the cut set");

    // uniformizing coordinate of the basepoint lift via the w1 correspondence
    const cplx halves[3] = {0.5, 0.5 * lat_.tau, 0.5 * (1.0 + lat_.tau)};
    cplx h1{0.0, 0.0};
    double best = 1e300;
    for (const cplx& h : halves) {
        const double d = std::abs(covering_map(h, lat_, bp_, wp_) - bp_.z1);
        if (d < best) {
            best = d;
            h1 = h;
        }
    }
    if (best > 1e-6)
        throw NumericalError("half-period/branch-point correspondence failed");
    const cplx a_w1 =
        integ_.integrate_phi_to_branch(z0_, 0, 1, cfg_.quad_tol) / lat_.omega1;
    u0_ = h1 - a_w1;
    c0_ = -2.0 * u0_;

    if (cfg_.convention) {
        conv_ = *cfg_.convention;
        compute_column_norms();
    } else {
        calibrate();
    }
    locate_apparent_points();
}

cplx ExplicitSolution::v_formula(cplx z) const {
    const CutGeometry& c = integ_.cuts();
    const cplx raw = c.f12_quarter(z) * c.f3_quarter(z);
    const cplx raw0 = c.f12_quarter(z0_) * c.f3_quarter(z0_);
    return raw / raw0;
}

ExplicitSolution::State ExplicitSolution::initial_state() const {
    return {z0_, {0.0, 0.0}, 0, 0};
}

ExplicitSolution::State ExplicitSolution::advance(const State& s,
                                                  cplx z_next) const {
    const cplx a0 = s.z, b0 = z_next;
    for (int k = 0; k < 3; ++k)
        if (dist_point_segment(bp_.at(k), a0, b0) < integ_.guard())
            throw PathThroughSingularity("rh path within guard of branch point");
    State out = s;
    std::vector<double> ts =
        integ_.cuts().segment_crossings(a0, b0, integ_.guard());
    ts.push_back(1.0);
    const cplx d = b0 - a0;
    double t0 = 0.0;
    for (double t1 : ts) {
        if (t1 > t0) {
            const double sign = out.parity == 0 ? 1.0 : -1.0;
            out.a += integrate_gk(
                         [&](double t) {
                             return d / (sign * integ_.cuts().y1(a0 + t * d));
                         },
                         t0, t1, cfg_.quad_tol) /
                     lat_.omega1;
        }
        if (t1 < 1.0) {
            const cplx zc = a0 + t1 * d;
            const double eps = 1e-7 * std::max(1.0, std::abs(d));
            const cplx du = d / std::abs(d);
            const cplx before = v_formula(zc - eps * du);
            const cplx after = v_formula(zc + eps * du);
            out.v_pow = (out.v_pow + snap_unit(before / after)) % 4;
            out.parity ^= 1;
        }
        t0 = t1;
    }
    out.z = b0;
    return out;
}

ExplicitSolution::State ExplicitSolution::advance_arc(const State& s,
                                                      cplx center,
                                                      double radius,
                                                      double th0,
                                                      double th1) const {
    State out = s;
    const int n_chunks =
        std::max(1, static_cast<int>(std::ceil(std::abs(th1 - th0) / 0.7)));
    std::vector<double> angs =
        integ_.cuts().circle_crossings(center, radius, integ_.guard());
    for (int c = 0; c < n_chunks; ++c) {
        const double ta = th0 + (th1 - th0) * c / n_chunks;
        const double tb = th0 + (th1 - th0) * (c + 1) / n_chunks;
        // crossing angles inside (ta,tb), unwrapped
        std::vector<double> cuts_here;
        for (double a : angs) {
            const double base = std::floor((std::min(ta, tb) - a) / (2 * pi));
            for (int k = 0; k < 3; ++k) {
                const double cand = a + (base + k) * 2 * pi;
                if (cand > std::min(ta, tb) + 1e-13 &&
                    cand < std::max(ta, tb) - 1e-13)
                    cuts_here.push_back(cand);
            }
        }
        std::sort(cuts_here.begin(), cuts_here.end());
        if (tb < ta) std::reverse(cuts_here.begin(), cuts_here.end());
        cuts_here.push_back(tb);
        double t0 = ta;
        for (double t1 : cuts_here) {
            if (std::abs(t1 - t0) > 1e-15) {
                const double sign = out.parity == 0 ? 1.0 : -1.0;
                out.a += integrate_gk(
                             [&](double th) {
                                 const cplx e = std::exp(iu * th);
                                 return iu * radius * e /
                                        (sign * integ_.cuts().y1(center + radius * e));
                             },
                             t0, t1, cfg_.quad_tol) /
                         lat_.omega1;
            }
            if (t1 != tb) {
                const cplx zc = center + radius * std::exp(iu * t1);
                const double orient = tb > ta ? 1.0 : -1.0;
                const cplx du = orient * iu * std::exp(iu * t1);
                const double eps = 1e-7 * std::max(1.0, radius);
                const cplx before = v_formula(zc - eps * du);
                const cplx after = v_formula(zc + eps * du);
                out.v_pow = (out.v_pow + snap_unit(before / after)) % 4;
                out.parity ^= 1;
            }
            t0 = t1;
        }
    }
    out.z = center + radius * std::exp(iu * th1);
    return out;
}

cplx ExplicitSolution::theta_entry(int r, int s, cplx u1) const {
    const RhRowTheta& row = conv_.row[r];
    const cplx arg = sigma(s) * u1;
    const cplx den = theta(arg + row.den_shift, lat_.tau, row.den);
    if (std::abs(den) < 1e-12)
        throw ThetaDenominatorZero("theta denominator vanishes at this point");
    return theta(arg + row.num_shift, lat_.tau, row.num) / den;
}

// Prefactor entries: the fourth-root branches are continued so that
// X = Fd*I + Fo*J (antisymmetric off-diagonal). This is the reading under
// which the jump X_- = X_+ J holds; it also gives det X = 1 identically and
// a rank-one leading coefficient at each branch point.
Mat2 ExplicitSolution::entries(cplx u1, cplx v) const {
    const cplx xd = 0.5 * (v + 1.0 / v);
    const cplx xo = 0.5 * iu * (v - 1.0 / v);
    Mat2 y;
    y(0, 0) = xd * theta_entry(0, 0, u1) * col_norm_[0];
    y(0, 1) = xo * theta_entry(0, 1, u1) * col_norm_[1];
    y(1, 0) = -xo * theta_entry(1, 0, u1) * col_norm_[0];
    y(1, 1) = xd * theta_entry(1, 1, u1) * col_norm_[1];
    return y;
}

Mat2 ExplicitSolution::X_of_state(const State& s) const {
    const cplx v = unit_pow(s.v_pow) * v_formula(s.z);
    const cplx xd = 0.5 * (v + 1.0 / v);
    const cplx xo = 0.5 * iu * (v - 1.0 / v);
    Mat2 x;
    x << xd, xo, -xo, xd;
    return x;
}

Mat2 ExplicitSolution::Y_of_state(const State& s) const {
    const cplx v = unit_pow(s.v_pow) * v_formula(s.z);
    return entries(u0_ + s.a, v);
}

void ExplicitSolution::compute_column_norms() {
    for (int s = 0; s < 2; ++s) {
        const RhRowTheta& row = conv_.row[s];
        const cplx arg = sigma(s) * u0_;
        const cplx num = theta(arg + row.num_shift, lat_.tau, row.num);
        const cplx den = theta(arg + row.den_shift, lat_.tau, row.den);
        if (std::abs(num) < 1e-10)
            throw CharacteristicNullZero(
                "excluded characteristics: normalizing theta value vanishes");
        col_norm_[s] = den / num;
    }
    if (conv_.k_mode == 1)
        col_norm_[1] = std::exp(2.0 * pi * iu * cfg_.ch.delta) * col_norm_[0];
    if (conv_.k_mode == 2)
        col_norm_[1] = std::exp(-2.0 * pi * iu * cfg_.ch.delta) * col_norm_[0];
}

std::vector<cplx> ExplicitSolution::plan_path(cplx z) const {
    const double D = std::max({std::abs(bp_.z1 - bp_.z2),
                               std::abs(bp_.z2 - bp_.z3),
                               std::abs(bp_.z1 - bp_.z3)});
    const cplx g = 0.5 * (bp_.z2 + bp_.z3);
    const cplx n23 = iu * (bp_.z3 - bp_.z2) / std::abs(bp_.z3 - bp_.z2);
    const cplx low = z0_ + (z0_ - 0.5 * (bp_.z1 + bp_.z2));

    // steep final approach for targets hugging the cut set
    cplx away = z - integ_.cuts().nearest_point_on_cuts(z);
    if (std::abs(away) < 1e-14) away = iu;
    const cplx w = z + 0.2 * D * away / std::abs(away);

    const std::vector<std::vector<cplx>> candidates = {
        {},
        {g},
        {g + 0.2 * D * n23},
        {g - 0.2 * D * n23},
        {w},
        {g, w},
        {g + 0.2 * D * n23, w},
        {g - 0.2 * D * n23, w},
        {low, g + 0.2 * D * n23},
        {low, g - 0.2 * D * n23},
        {low, g},
        {low, g + 0.2 * D * n23, w},
        {low, g - 0.2 * D * n23, w},
    };

    for (const auto& wp : candidates) {
        std::vector<cplx> path;
        path.push_back(z0_);
        path.insert(path.end(), wp.begin(), wp.end());
        path.push_back(z);
        bool ok = true;
        for (size_t i = 0; ok && i + 1 < path.size(); ++i) {
            for (int k = 0; k < 3; ++k)
                if (dist_point_segment(bp_.at(k), path[i], path[i + 1]) <
                    integ_.guard())
                    ok = false;
            if (!ok) break;
            try {
                if (!integ_.cuts()
                         .segment_crossings(path[i], path[i + 1], integ_.guard())
                         .empty())
                    ok = false;
            } catch (const PathThroughSingularity&) {
                ok = false;
            }
        }
        if (ok) return path;
    }
    throw PathThroughSingularity("no cut-avoiding route to evaluation point");
}

Mat2 ExplicitSolution::eval_X(cplx z) const {
    if (integ_.cuts().distance_to_cuts(z) < 1e-13)
        throw OnCut("evaluation point lies on the cut set");
    const auto path = plan_path(z);
    State s = initial_state();
    for (size_t i = 1; i < path.size(); ++i) s = advance(s, path[i]);
    return X_of_state(s);
}

Mat2 ExplicitSolution::eval_Y(cplx z, int sheet) const {
    if (integ_.cuts().distance_to_cuts(z) < 1e-13)
        throw OnCut("evaluation point lies on the cut set");
    const auto path = plan_path(z);
    State s = initial_state();
    for (size_t i = 1; i < path.size(); ++i) s = advance(s, path[i]);
    if (sheet == 1) return Y_of_state(s);
    // involution: opposite lift assignment, coordinate u -> -u
    const cplx v =
        conv_.involution_v_factor * unit_pow(s.v_pow) * v_formula(s.z);
    return entries(-(u0_ + s.a), v);
}

Mat2 ExplicitSolution::eval_Y_along(std::span<const cplx> waypoints) const {
    State s = initial_state();
    for (const cplx& w : waypoints) s = advance(s, w);
    return Y_of_state(s);
}

double ExplicitSolution::jump_defect_at(cplx zeta, cplx cut_dir) const {
    const cplx n = double(conv_.jump_side_sign) * iu * cut_dir / std::abs(cut_dir);
    const double eps = 1e-9 * std::max(1.0, std::abs(bp_.z2 - bp_.z1));
    const Mat2 yp = eval_Y(zeta + eps * n);
    const Mat2 ym = eval_Y(zeta - eps * n);
    return frobenius(ym - yp * kJump);
}

JumpReport ExplicitSolution::verify_jump(int points_per_cut) const {
    double worst = 0.0;
    const cplx d12 = bp_.z2 - bp_.z1;
    // keep test points outside the branch-point guard disks
    const double margin = 2.0 * integ_.guard() / std::abs(d12);
    for (int j = 0; j < points_per_cut; ++j) {
        const double t =
            margin + (1.0 - 2.0 * margin) * (j + 0.5) / points_per_cut;
        worst = std::max(worst, jump_defect_at(bp_.z1 + t * d12, d12));
    }
    const cplx dir = integ_.cuts().ray_dir;
    const double span = 1.3 * std::abs(bp_.z3 - bp_.z2);
    for (int j = 0; j < points_per_cut; ++j) {
        const double t = 0.08 + (j + 0.5) / points_per_cut;
        worst = std::max(worst, jump_defect_at(bp_.z3 + span * t * dir, dir));
    }
    return {worst, 2 * points_per_cut};
}

ColumnMonodromy ExplicitSolution::column_monodromy() const {
    auto loop_matrix = [&](cplx p, cplx q) {
        const cplx c = 0.5 * (p + q);
        const double r_in = 0.5 * std::abs(p - q);
        cplx other{0.0, 0.0};
        for (int k = 0; k < 3; ++k)
            if (std::abs(bp_.at(k) - p) > 1e-12 &&
                std::abs(bp_.at(k) - q) > 1e-12)
                other = bp_.at(k);
        const double r_out = std::abs(other - c);
        const double R = r_in + 0.5 * (r_out - r_in);
        const cplx entry_dir = (z0_ - c) / std::abs(z0_ - c);
        const double th0 = std::arg(entry_dir);
        State s = initial_state();
        s = advance(s, c + R * entry_dir);
        s = advance_arc(s, c, R, th0, th0 + 2 * pi);
        s = advance(s, z0_);
        if (std::abs(s.z - z0_) > 1e-12)
            throw NumericalError("monodromy loop did not close");
        return Y_of_state(s);
    };
    const Mat2 y0 = Y_of_state(initial_state());
    const Mat2 ma = loop_matrix(bp_.z1, bp_.z2) * y0.inverse();
    const Mat2 mb = loop_matrix(bp_.z2, bp_.z3) * y0.inverse();
    ColumnMonodromy out;
    out.mu_a = {ma(0, 0), ma(1, 1)};
    out.mu_b = {mb(0, 0), mb(1, 1)};
    double leak = 0.0;
    for (const Mat2& m : {ma, mb}) {
        const double scale = m.cwiseAbs().maxCoeff();
        leak = std::max(
            leak, std::max(std::abs(m(0, 1)), std::abs(m(1, 0))) / scale);
    }
    out.leakage = leak;
    return out;
}

ExplicitSolution::CircleSampler::CircleSampler(const ExplicitSolution& sol,
                                               cplx center, double radius)
    : sol_(sol), center_(center), radius_(radius) {
    // base state at relative angle 0 (entry on the z0 side of the circle)
    const double th_ref = std::arg(sol.basepoint() - center);
    State s = sol.initial_state();
    const cplx entry = center + radius * std::exp(iu * th_ref);
    const auto route = sol.plan_path(entry);
    for (size_t i = 1; i < route.size(); ++i) s = sol.advance(s, route[i]);
    cache_.emplace_back(0.0, s);
}

Mat2 ExplicitSolution::CircleSampler::operator()(double theta) const {
    // continue from the nearest cached angle
    size_t best = 0;
    for (size_t i = 1; i < cache_.size(); ++i)
        if (std::abs(cache_[i].first - theta) <
            std::abs(cache_[best].first - theta))
            best = i;
    const double th_ref = std::arg(sol_.basepoint() - center_);
    State s = sol_.advance_arc(cache_[best].second, center_, radius_,
                               th_ref + cache_[best].first, th_ref + theta);
    if (std::abs(theta - cache_[best].first) > 0.05)
        cache_.emplace_back(theta, s);
    return sol_.Y_of_state(s);
}

Mat2 ExplicitSolution::residue_at_pole(int k, double radius_rel,
                                       int n_nodes) const {
    const double R = radius_rel * bp_.min_pairwise_distance();
    CircleSampler sampler(*this, bp_.at(k), R);
    return residues_from_solution([&](double th) { return sampler(th); },
                                  bp_.at(k), R, n_nodes, 2e-6);
}

Mat2 ExplicitSolution::residue_at_point(cplx center, double radius,
                                        int n_nodes) const {
    CircleSampler sampler(*this, center, radius);
    return residues_from_solution([&](double th) { return sampler(th); },
                                  center, radius, n_nodes, 2e-6);
}

FuchsianSystem ExplicitSolution::extracted_system(double radius_rel) const {
    FuchsianSystem sys;
    sys.poles = {bp_.z1, bp_.z2, bp_.z3};
    for (int k = 0; k < 3; ++k)
        sys.residues.push_back(residue_at_pole(k, radius_rel));
    for (const cplx& za : apparent_) {
        double clearance = integ_.cuts().distance_to_cuts(za);
        for (int k = 0; k < 3; ++k)
            clearance = std::min(clearance, std::abs(za - bp_.at(k)));
        sys.poles.push_back(za);
        sys.residues.push_back(
            residue_at_point(za, std::min(0.3 * clearance, 0.25), 96));
    }
    return sys;
}

void ExplicitSolution::locate_apparent_points() {
    apparent_.clear();
    const cplx tau = lat_.tau;
    const RhRowTheta& row = conv_.row[0];
    const cplx zero = reduce_mod_lattice(
        0.5 * (1.0 + tau) - row.num.epsilon - row.num.delta * tau -
            row.num_shift,
        tau);
    // a zero divisor on the half lattice merges with the branch-point
    // structure; only interior zeros give a separate apparent point
    for (const cplx h : {cplx{0.0, 0.0}, cplx{0.5, 0.0}, 0.5 * tau,
                         0.5 * (1.0 + tau)}) {
        if (std::abs(reduce_mod_lattice(zero - h, tau)) < 1e-6) return;
    }
    apparent_.push_back(covering_map(zero, lat_, bp_, wp_));
}

double ExplicitSolution::probe_score(int jump_sign, double* jump_out,
                                     double* res_out, double* reg_out) const {
    auto* self = const_cast<ExplicitSolution*>(this);
    self->conv_.jump_side_sign = jump_sign;
    self->locate_apparent_points();

    double jump = 0.0;
    const cplx d12 = bp_.z2 - bp_.z1;
    jump = std::max(jump, jump_defect_at(bp_.z1 + 0.43 * d12, d12));
    const cplx dir = integ_.cuts().ray_dir;
    jump = std::max(jump,
                    jump_defect_at(bp_.z3 + 0.57 * std::abs(d12) * dir, dir));
    if (jump_out) *jump_out = jump;
    if (jump > 1e-3) {
        // hopeless member: skip the expensive residue probes
        if (res_out) *res_out = 1e3;
        if (reg_out) *reg_out = 1e3;
        return jump;
    }

    double res = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Mat2 a = residue_at_pole(k, 0.18, 32);
        Eigen::ComplexEigenSolver<Mat2> es(a);
        cplx l0 = es.eigenvalues()(0), l1 = es.eigenvalues()(1);
        if (l0.real() < l1.real()) std::swap(l0, l1);
        res = std::max({res, std::abs(l0 - 0.25), std::abs(l1 + 0.25)});
    }

    // apparent point: residue there must have exponents {1, 0} (i.e. the
    // singularity is apparent, with trivial monodromy)
    double reg = 0.0;
    for (const cplx& za : apparent_) {
        double clearance = 1e300;
        for (int k = 0; k < 3; ++k)
            clearance = std::min(clearance, std::abs(za - bp_.at(k)));
        try {
            const Mat2 b =
                residue_at_point(za, std::min(0.3 * clearance, 0.25), 32);
            Eigen::ComplexEigenSolver<Mat2> es(b);
            cplx l0 = es.eigenvalues()(0), l1 = es.eigenvalues()(1);
            if (l0.real() < l1.real()) std::swap(l0, l1);
            reg = std::max({reg, std::abs(l0 - 1.0), std::abs(l1)});
        } catch (const NumericalError&) {
            reg = 1e3;
        }
    }
    // and nothing may hide at a generic midpoint away from it
    cplx probe = 0.5 * (z0_ + 0.5 * (bp_.z2 + bp_.z3));
    double clear_probe = 1e300;
    for (const cplx& za : apparent_)
        clear_probe = std::min(clear_probe, std::abs(probe - za));
    if (clear_probe > 0.45 * std::abs(probe - z0_)) {
        try {
            const Mat2 r =
                residue_at_point(probe, 0.3 * std::abs(probe - z0_), 32);
            reg = std::max(reg, frobenius(r));
        } catch (const NumericalError&) {
            reg = 1e3;
        }
    }
    if (res_out) *res_out = res;
    if (reg_out) *reg_out = reg;
    return std::max({jump, res, reg});
}

void ExplicitSolution::calibrate() {
    const ConventionKey key{bp_.z1.real(), bp_.z1.imag(), bp_.z2.real(),
                            bp_.z2.imag(), bp_.z3.real(), bp_.z3.imag(),
                            cfg_.ch.delta, cfg_.ch.epsilon, z0_.real(),
                            z0_.imag()};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = convention_cache().find(key);
        if (it != convention_cache().end()) {
            conv_ = it->second;
            compute_column_norms();
            return;
        }
    }

    const cplx tau = lat_.tau;
    // Structure derived from the jump and singularity requirements:
    //  - denominator zeros must sit at the infinity branch point (u = 0),
    //    so den_shift_r = (1+tau)/2 - h_r - g_r tau for den chars (g_r,h_r);
    //  - pure-J jumps on both arcs force num_shift - den_shift =
    //    dm*delta - es*eps_r mod 1 with dm matching the planner's sewing
    //    class between the two arcs;
    //  - the rows' numerator zero divisors must not coincide (else det Y
    //    acquires zeros, i.e. apparent singularities), which requires an
    //    extra offset s = 1/2 on the second row's epsilon characteristic.
    const std::array<ThetaCharacteristics, 4> gh_options = {
        ThetaCharacteristics{0.0, 0.0}, ThetaCharacteristics{0.5, 0.5},
        ThetaCharacteristics{0.5, 0.0}, ThetaCharacteristics{0.0, 0.5}};

    double best = 1e300;
    RhConvention winner;
    bool found = false;

    for (const auto& gh : gh_options)
        for (double s : {0.5, 0.0})
            for (int dm : {-1, 0, 1})
                for (double es : {-1.0, +1.0})
                    for (int k_mode : {0, 1, 2}) {
                        RhConvention cand;
                        cand.k_mode = k_mode;
                        for (int r = 0; r < 2; ++r) {
                            RhRowTheta& row = cand.row[r];
                            row.num = cfg_.ch;
                            row.den = {0.0, 0.0};
                            double eps_tilde = cfg_.ch.epsilon;
                            if (r == 1) {
                                row.num.delta += gh.delta;
                                row.num.epsilon += gh.epsilon + s;
                                row.den = gh;
                                eps_tilde += s;
                            }
                            row.den_shift = 0.5 * (1.0 + tau) -
                                            row.den.epsilon -
                                            row.den.delta * tau;
                            row.num_shift = row.den_shift +
                                            dm * cfg_.ch.delta + es * eps_tilde;
                        }
                        try {
                            conv_ = cand;
                            compute_column_norms();
                            for (int sign : {+1, -1}) {
                                const double score = probe_score(
                                    sign, nullptr, nullptr, nullptr);
                                if (score < best) {
                                    best = score;
                                    winner = conv_;
                                    found = true;
                                }
                            }
                        } catch (const NumericalError&) {
                            continue;
                        } catch (const ConfigInvalid&) {
                            continue;
                        }
                    }

    if (!found || best > 1e-4) {
        std::ostringstream os;
        os << "rh convention calibration failed (best defect " << best << ")";
        throw NumericalError(os.str());
    }
    conv_ = winner;
    compute_column_norms();

    // involution factor: pick the fourth root making Y(z,2) the column swap
    // of Y(z,1) up to scalars
    const cplx zt = z0_ + 0.31 * (0.5 * (bp_.z2 + bp_.z3) - z0_);
    const Mat2 y1m = eval_Y(zt, 1);
    double ibest = 1e300;
    cplx ifac{0.0, 1.0};
    for (int k = 0; k < 4; ++k) {
        conv_.involution_v_factor = unit_pow(k);
        const Mat2 y2m = eval_Y(zt, 2);
        // columns of y2 proportional to swapped columns of y1
        double d = 0.0;
        for (int s = 0; s < 2; ++s) {
            const Vec2 a = y2m.col(s), b = y1m.col(1 - s);
            const cplx lam = (b.adjoint() * a)(0) / (b.adjoint() * b)(0);
            d = std::max(d, (a - lam * b).norm() / a.norm());
        }
        if (d < ibest) {
            ibest = d;
            ifac = unit_pow(k);
        }
    }
    conv_.involution_v_factor = ifac;

    std::lock_guard<std::mutex> lock(cache_mutex);
    convention_cache()[key] = conv_;
}

}  // namespace ymh
