#pragma once

#include <span>
#include <vector>

#include "ymh/types.hpp"

namespace ymh {

// Branch points of y^2 = (z-z1)(z-z2)(z-z3); the fourth branch point is
// fixed at infinity.
struct BranchPoints {
    cplx z1, z2, z3;
    void validate() const;
    double min_pairwise_distance() const;
    cplx at(int k) const;  // k = 0,1,2
};

// A point on the double cover: base coordinate plus a sheet label selecting
// y = +y1(z) (sheet 1) or y = -y1(z) (sheet 2) for the cut convention below.
struct CurvePoint {
    cplx z;
    int sheet = 1;
};

struct PeriodLattice {
    cplx omega1, omega2;  // integrals of dz/y over the a- and b-cycles
    cplx tau;             // omega2/omega1, Im(tau) > 0
};

// Metric scale for h_r = r|du|^2 on the normalized torus C = C/{1,tau}.
struct MetricScale {
    double r = 1.0;
    double area_C = 0.0;      // r * Im(tau)
    double area_Sigma = 0.0;  // area_C / 2 (degree-2 quotient)
};

MetricScale make_metric_scale(double r, const PeriodLattice& lat);

// Cut convention: L = [z1,z2] union the ray from z3 in direction (z3-z2)/|..|.
// All square/fourth roots of the curve data branch exactly along L.
struct CutGeometry {
    cplx z1, z2, z3;
    cplx ray_dir;  // unit vector; cut is { z3 + t*ray_dir : t >= 0 }
    cplx mu3;      // constant with mu3^2 = -ray_dir

    static CutGeometry from(const BranchPoints& bp);

    // quarter root of (z-z1)/(z-z2); analytic off [z1,z2]
    cplx f12_quarter(cplx z) const;
    // quarter root of -(z-z3)/ray_dir; analytic off the ray
    cplx f3_quarter(cplx z) const;
    cplx sqrt12(cplx z) const;  // sqrt((z-z1)(z-z2)), cut [z1,z2]
    cplx sqrt3(cplx z) const;   // sqrt(z-z3), cut along the ray
    // Sheet-1 branch of y; analytic and nonzero off L and the branch points.
    cplx y1(cplx z) const;

    // Crossing parameters t in (0,1) at which the segment [a,b] meets the cut
    // set, sorted ascending. Crossings too close to a cut endpoint raise
    // PathThroughSingularity (the path would graze a branch point).
    std::vector<double> segment_crossings(cplx a, cplx b, double guard) const;

    // Crossing angles (radians, in [0,2pi)) of the circle |z-c|=R with the
    // cut set, sorted ascending.
    std::vector<double> circle_crossings(cplx c, double R, double guard) const;

    double distance_to_cuts(cplx z) const;
    cplx nearest_point_on_cuts(cplx z) const;
};

// Integrates the holomorphic differential phi = dz/y along explicit paths on
// the double cover, tracking the sheet through cut crossings.
class CurveIntegrator {
  public:
    CurveIntegrator(const BranchPoints& bp, double guard_rel = 0.05);

    struct PathResult {
        cplx integral;
        int end_sheet;
        int crossings;
    };

    PathResult integrate_phi(std::span<const cplx> polyline, int sheet,
                             double tol) const;

    // Straight path from `from` (given sheet) into branch point k; the
    // endpoint singularity is removed by the substitution z = z_k + s^2*dir.
    cplx integrate_phi_to_branch(cplx from, int k, int sheet,
                                 double tol) const;

    // CCW circle |z-c| = R traversed once from angle0; sheet tracked.
    PathResult integrate_phi_circle(cplx c, double R, double angle0, int sheet,
                                    double tol) const;

    const CutGeometry& cuts() const { return cuts_; }
    const BranchPoints& branch_points() const { return bp_; }
    double guard() const { return guard_; }

    cplx y_on_sheet(cplx z, int sheet) const;

  private:
    BranchPoints bp_;
    CutGeometry cuts_;
    double guard_;
};

// omega1, omega2 from explicit a/b contours (a encircles {z1,z2}, b encircles
// {z2,z3}); Im tau > 0 is enforced by negating omega2 if needed.
PeriodLattice compute_periods(const BranchPoints& bp, double quad_tol);

// Abel map normalized by omega1 (lattice {1, tau}). The path runs straight
// from basepoint.z to p.z unless waypoints are supplied; a sheet-correcting
// excursion around z1 is appended automatically when needed.
cplx abel_map(const CurvePoint& p, const CurvePoint& basepoint,
              const PeriodLattice& lat, const CurveIntegrator& integ,
              double tol, std::span<const cplx> waypoints = {});

// Reduce u modulo the lattice {1, tau} to the representative of smallest
// modulus.
cplx reduce_mod_lattice(cplx u, cplx tau);

// Weierstrass P and its derivative for the normalized lattice {1, tau}
// (Laurent series plus duplication).
struct WeierstrassP {
    explicit WeierstrassP(cplx tau);
    cplx g2, g3;
    cplx operator()(cplx u) const;
    std::pair<cplx, cplx> value_and_derivative(cplx u) const;
    cplx tau() const { return tau_; }

  private:
    cplx tau_;
    double r_min_;
    std::vector<cplx> coeff_;  // Laurent coefficients c_k, k = 2..
};

// z = (4/omega1^2) * P(u; tau) + (z1+z2+z3)/3. Maps half periods to branch
// points and lattice points to infinity.
cplx covering_map(cplx u, const PeriodLattice& lat, const BranchPoints& bp,
                  const WeierstrassP& wp);

enum class FormType { du, dubar };

// Flat-metric Hodge star on 1-forms: *du = -i du, *dubar = +i dubar.
inline cplx hodge_star(FormType f) {
    return f == FormType::du ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
}

}  // namespace ymh
