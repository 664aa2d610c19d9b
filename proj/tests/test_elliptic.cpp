#include <cmath>
#include <random>

#include "doctest.h"
#include "ymh/elliptic.hpp"

using namespace ymh;

namespace {

// AGM oracle for complete elliptic integrals: K(k) = pi / (2 agm(1, k')).
double agm(double a, double b) {
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return a;
}

double ellip_K(double k) { return pi / (2.0 * agm(1.0, std::sqrt(1.0 - k * k))); }

BranchPoints random_triple(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    while (true) {
        BranchPoints bp{{box(rng), box(rng)}, {box(rng), box(rng)}, {box(rng), box(rng)}};
        if (bp.min_pairwise_distance() < 0.7) continue;
        try {
            bp.validate();
            compute_periods(bp, 1e-10);
            return bp;
        } catch (const NumericalError&) {
            continue;
        }
    }
}

}  // namespace

TEST_CASE("lemniscatic lattice: tau = i against the AGM oracle") {
    const BranchPoints bp{{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    const PeriodLattice lat = compute_periods(bp, 1e-11);

    // oracle: real-ordered branch points e1<e2<e3, k^2 = (e2-e1)/(e3-e1)
    const double k = std::sqrt(0.5);
    const double kp = std::sqrt(0.5);
    const cplx tau_oracle = iu * ellip_K(kp) / ellip_K(k);
    CHECK(std::abs(lat.tau - tau_oracle) < 1e-9);
    CHECK(std::abs(lat.tau - iu) < 1e-9);

    // |omega_a| = 4 K(k)/sqrt(e3-e1)
    CHECK(std::abs(std::abs(lat.omega1) - 4.0 * ellip_K(k) / std::sqrt(2.0)) < 1e-9);
}

TEST_CASE("real-triple period against AGM, non-square lattice") {
    const BranchPoints bp{{-1.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}};
    const PeriodLattice lat = compute_periods(bp, 1e-11);
    const double k = std::sqrt(1.0 / 3.0), kp = std::sqrt(2.0 / 3.0);
    CHECK(std::abs(lat.tau - iu * ellip_K(kp) / ellip_K(k)) < 1e-9);
    CHECK(lat.tau.imag() > 0);
}

TEST_CASE("homology invariance: deformed contours give the same periods") {
    const BranchPoints bp{{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    CurveIntegrator integ(bp);
    const cplx c = 0.5 * (bp.z1 + bp.z2);
    const auto r1 = integ.integrate_phi_circle(c, 0.62, 0.0, 1, 1e-11);
    const auto r2 = integ.integrate_phi_circle(c, 0.81, 1.3, 1, 1e-11);
    CHECK(r1.end_sheet == 1);
    CHECK(r2.end_sheet == 1);
    CHECK(std::abs(r1.integral - r2.integral) < 1e-9);
}

TEST_CASE("Im tau > 0 for random generic triples") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 8; ++i) {
        const BranchPoints bp = random_triple(rng);
        const PeriodLattice lat = compute_periods(bp, 1e-9);
        CHECK(lat.tau.imag() > 1e-12);
    }
}

TEST_CASE("abel map basics") {
    const BranchPoints bp{{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    const PeriodLattice lat = compute_periods(bp, 1e-11);
    CurveIntegrator integ(bp);
    const CurvePoint p0{{-0.5, -1.0}, 1};

    SUBCASE("basepoint maps to zero") {
        CHECK(std::abs(abel_map(p0, p0, lat, integ, 1e-11)) < 1e-12);
    }

    SUBCASE("closed a-cycle is a lattice vector") {
        // rectangle loop enclosing z1, z2 only
        const cplx loop[5] = {{-1.4, -0.5}, {0.4, -0.5}, {0.4, 0.5},
                              {-1.4, 0.5},  {-1.4, -0.5}};
        const auto res = integ.integrate_phi(loop, 1, 1e-11);
        CHECK(res.end_sheet == 1);
        const cplx u = res.integral / lat.omega1;
        CHECK(std::abs(reduce_mod_lattice(u, lat.tau)) < 1e-9);
        CHECK(std::abs(u) > 0.5);  // genuinely a nonzero period
    }

    SUBCASE("other-sheet basepoint: A(iota P0) = -2 u0 mod lattice") {
        // general invariant, measured through the w1 correspondence
        const WeierstrassP wp(lat.tau);
        const cplx halves[3] = {0.5, 0.5 * lat.tau, 0.5 + 0.5 * lat.tau};
        cplx h1{0, 0};
        for (const cplx& h : halves)
            if (std::abs(covering_map(h, lat, bp, wp) - bp.z1) < 1e-6) h1 = h;
        REQUIRE(std::abs(h1) > 0.1);
        const cplx a_w1 =
            integ.integrate_phi_to_branch(p0.z, 0, p0.sheet, 1e-11) / lat.omega1;
        const cplx u0 = h1 - a_w1;  // u-coordinate of the basepoint lift
        const CurvePoint p0_other{p0.z, 2};
        const cplx c = abel_map(p0_other, p0, lat, integ, 1e-11);
        CHECK(std::abs(reduce_mod_lattice(c + 2.0 * u0, lat.tau)) < 1e-8);
    }

    SUBCASE("quarter-lattice basepoint reaches the other sheet at a half period") {
        const WeierstrassP wp(lat.tau);
        const cplx u_quarter = 0.25 + 0.25 * lat.tau;
        const cplx z_quarter = covering_map(u_quarter, lat, bp, wp);
        const CurvePoint q1{z_quarter, 1}, q2{z_quarter, 2};
        const cplx c = abel_map(q2, q1, lat, integ, 1e-11);
        CHECK(std::abs(reduce_mod_lattice(2.0 * c, lat.tau)) < 1e-8);
        CHECK(std::abs(reduce_mod_lattice(c, lat.tau)) > 0.1);
    }
}

TEST_CASE("weierstrass P satisfies its differential equation") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> un(0.05, 0.95);
    for (const cplx tau : {cplx{0.0, 1.0}, cplx{0.3, 0.8}, cplx{1.0, 2.0}}) {
        const WeierstrassP wp(tau);
        for (int i = 0; i < 12; ++i) {
            const cplx u = un(rng) + un(rng) * tau;
            const auto [p, dp] = wp.value_and_derivative(u);
            const cplx lhs = dp * dp;
            const cplx rhs = 4.0 * p * p * p - wp.g2 * p - wp.g3;
            CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(lhs)));
        }
    }
}

TEST_CASE("covering map: half periods hit branch points; even and periodic") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> un(0.1, 0.9);
    for (int trial = 0; trial < 5; ++trial) {
        const BranchPoints bp = random_triple(rng);
        const PeriodLattice lat = compute_periods(bp, 1e-11);
        const WeierstrassP wp(lat.tau);
        const cplx halves[3] = {0.5, 0.5 * lat.tau, 0.5 + 0.5 * lat.tau};
        // each half period must land on exactly one branch point (as sets)
        bool used[3] = {false, false, false};
        for (const cplx& h : halves) {
            const cplx z = covering_map(h, lat, bp, wp);
            double best = 1e300;
            int arg = -1;
            for (int k = 0; k < 3; ++k) {
                const double d = std::abs(z - bp.at(k));
                if (d < best) {
                    best = d;
                    arg = k;
                }
            }
            CHECK(best < 1e-8);
            CHECK(!used[arg]);
            used[arg] = true;
        }
        // evenness and lattice periodicity at a random point
        const cplx u = un(rng) + un(rng) * lat.tau;
        const cplx zu = covering_map(u, lat, bp, wp);
        CHECK(std::abs(covering_map(-u, lat, bp, wp) - zu) < 1e-8 * (1 + std::abs(zu)));
        CHECK(std::abs(covering_map(u + 1.0 + lat.tau, lat, bp, wp) - zu) <
              1e-8 * (1 + std::abs(zu)));
    }
}

TEST_CASE("abel map inverts the covering map up to sign") {
    const BranchPoints bp{{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    const PeriodLattice lat = compute_periods(bp, 1e-11);
    const WeierstrassP wp(lat.tau);
    CurveIntegrator integ(bp);
    const CurvePoint p0{{-0.5, -1.0}, 1};
    const cplx u0_ref = 0.23 + 0.31 * lat.tau;

    const cplx z = covering_map(u0_ref, lat, bp, wp);
    // lift on either sheet; abel difference must be +-(u - u_base) mod lattice
    const cplx a1 = abel_map({z, 1}, p0, lat, integ, 1e-11);
    const cplx a2 = abel_map({z, 2}, p0, lat, integ, 1e-11);
    // the two lifts are negatives of each other up to the basepoint shift:
    // A(P1) + A(P2) == A(iota P0) mod lattice for every z
    const cplx zb = covering_map(0.76 + 0.11 * lat.tau, lat, bp, wp);
    const cplx b1 = abel_map({zb, 1}, p0, lat, integ, 1e-11);
    const cplx b2 = abel_map({zb, 2}, p0, lat, integ, 1e-11);
    CHECK(std::abs(reduce_mod_lattice((a1 + a2) - (b1 + b2), lat.tau)) < 1e-8);

    // and the abel coordinate tracks u up to sign and lattice:
    const cplx w = covering_map(u0_ref + 0.1, lat, bp, wp);
    const cplx da = abel_map({w, 1}, CurvePoint{z, 1}, lat, integ, 1e-11);
    const bool plus = std::abs(reduce_mod_lattice(da - 0.1, lat.tau)) < 1e-8;
    const bool minus = std::abs(reduce_mod_lattice(da + 0.1, lat.tau)) < 1e-8;
    CHECK((plus || minus));
}

TEST_CASE("hodge star on 1-forms") {
    CHECK(hodge_star(FormType::du) == cplx{0.0, -1.0});
    CHECK(hodge_star(FormType::dubar) == cplx{0.0, 1.0});
    // *(*(du)) = -du
    CHECK(hodge_star(FormType::du) * hodge_star(FormType::du) == cplx{-1.0, 0.0});
}

TEST_CASE("metric scale arithmetic") {
    PeriodLattice lat;
    lat.omega1 = 1.0;
    lat.omega2 = iu;
    lat.tau = iu;
    const MetricScale m = make_metric_scale(2.0, lat);
    CHECK(m.area_C == doctest::Approx(2.0));
    CHECK(m.area_Sigma == doctest::Approx(1.0));
    CHECK(m.area_Sigma * 2.0 == m.area_C);
    CHECK_THROWS_AS(make_metric_scale(0.0, lat), ConfigInvalid);
}

TEST_CASE("degenerate input is rejected") {
    const BranchPoints bad{{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    CHECK_THROWS_AS(bad.validate(), ConfigInvalid);
    const BranchPoints bp{{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    CurveIntegrator integ(bp);
    // path straight through the branch point z2 = 0
    const cplx through[2] = {{0.0, -0.5}, {0.0, 0.5}};
    CHECK_THROWS_AS(integ.integrate_phi(through, 1, 1e-10),
                    PathThroughSingularity);
}
