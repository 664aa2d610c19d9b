#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "ymh/types.hpp"

namespace ymh {

// Rank-2 Fuchsian system dY/dz = (sum_k A_k/(z - z_k) + t(z)) Y with an
// optional scalar twist t(z) (Fubini-Study addition).
struct FuchsianSystem {
    std::vector<cplx> poles;
    std::vector<Mat2> residues;
    std::function<cplx(cplx)> twist;  // may be empty

    Mat2 coefficient(cplx z) const;
    cplx trace_coefficient(cplx z) const;
    Mat2 residue_sum() const;  // = -A_infinity
    double min_pole_distance() const;
    void validate() const;
};

struct ContinuationPath {
    std::vector<cplx> pts;
    double guard_radius = 0.0;  // 0: default 0.1 * min pairwise pole distance

    void validate(const FuchsianSystem& sys) const;

    // tail from basepoint to a CCW circle around `center` and back
    static ContinuationPath loop_around(cplx center, double radius,
                                        cplx basepoint, int n_arc = 48,
                                        bool clockwise = false);
    static ContinuationPath segment(cplx a, cplx b);
};

struct IntegrateResult {
    Mat2 Y;
    double wronskian_defect;  // relative defect of det Y vs exp(int tr)
    long steps;
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) along the polyline.
IntegrateResult integrate(const FuchsianSystem& sys,
                          const ContinuationPath& path, const Mat2& Y0,
                          double tol);

struct MonodromyRep {
    std::array<Mat2, 4> rho;
    cplx basepoint;
    double product_defect;    // min over sign/order of ||rho...rho -+ I||
    int product_sign;         // +1 or -1, whichever is realized
    bool order_reversed;      // true if rho4*rho3*rho2*rho1 is the identity order
    std::array<double, 4> det_defect;
    Mat2 rho4_from_relation;  // inverse of the ordered product of rho1..rho3
};

// Standard generators: rho_i from loops around each finite pole plus a loop
// around infinity (large clockwise circle). rho4 is measured directly and
// also derived from the product relation; both are reported.
MonodromyRep monodromy_generators(const FuchsianSystem& sys, cplx basepoint,
                                  double tol = 1e-10);

// As above but with caller-supplied loops (gamma_1..gamma_4).
MonodromyRep monodromy_from_loops(const FuchsianSystem& sys, cplx basepoint,
                                  std::span<const ContinuationPath> loops,
                                  double tol = 1e-10);

// (1/2 pi i) contour integral of (dY/dz) Y^{-1} on |z - pole| = radius.
// The sampler must be continuous in theta on [-0.1, 2pi + 0.1]; derivatives
// are taken by central differences in theta.
Mat2 residues_from_solution(const std::function<Mat2(double)>& sampler,
                            cplx pole, double radius, int n_nodes = 64,
                            double fd_h = 1e-5);

struct NonparabolicReport {
    bool parabolic = false;
    bool degenerate = false;
    Mat2 conjugator;
    double diag_defect = 0.0;      // off-diagonal mass of conjugated Gamma images
    double antidiag_defect = 0.0;  // [[0,a],[-1/a,0]] form of the generators
    double commute_defect = 0.0;   // abelian defect of the even-word subgroup
};

// Conjugates the Gamma-subgroup images (even words) to diagonal form and
// reports whether the generators become antidiagonal. The parabolic branch is
// signaled, not thrown.
NonparabolicReport check_nonparabolic_form(const MonodromyRep& rep);

// w = 1/z chart: poles {0} u {1/z_k}, residues {-sum A_k} u {A_k}.
FuchsianSystem infinity_chart(const FuchsianSystem& sys);

}  // namespace ymh
