#pragma once

#include <array>
#include <complex>

#include "pinchlab/special_functions.hpp"

namespace pinchlab {

enum class IsometryClass { Elliptic, Parabolic, Hyperbolic };

/// Width of the band ||tr| - 2| within which a normalized matrix counts as parabolic.
inline constexpr double parabolic_band = 1e-9;

/// Real 2x2 matrix acting on the upper half-plane, identified up to sign.
struct MobiusMatrix {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 1.0;

    static MobiusMatrix identity() { return {}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    /// Scaled to |det| = 1.
    MobiusMatrix normalized() const;

    /// Inverse up to scale (the adjugate, normalized).
    MobiusMatrix inverse() const;

    cplx apply(cplx z) const;

    MobiusMatrix operator*(const MobiusMatrix& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

IsometryClass classify(const MobiusMatrix& m, double band = parabolic_band);

/// 2 arcosh(|tr|/2) of the normalized matrix; throws Domain if not hyperbolic.
double translation_length(const MobiusMatrix& m);

/// Distance of m from +-identity after normalization (max entry deviation).
double identity_residual(const MobiusMatrix& m);

/// A circle or line {a0 |x|^2 - 2 <x,(a1,a2)> + a3 = 0} as a projective 4-vector.
struct ProjectiveCircle {
    std::array<double, 4> a{0.0, 1.0, 0.0, 0.0};

    double q_self() const;

    /// Rescaled so that q_self = 2 (requires q_self > 0).
    ProjectiveCircle normalized() const;

    /// Geodesic of the half-plane with real endpoints u1 != u2.
    static ProjectiveCircle half_circle(double u1, double u2);
    /// Vertical geodesic Re z = u.
    static ProjectiveCircle vertical_line(double u);

    /// Reflection in the geodesic as the matrix M with z -> M(conj z)
    /// (det = -q_self/2).
    MobiusMatrix reflection() const;

    /// Ideal endpoints (second endpoint is +inf for vertical lines).
    std::array<double, 2> endpoints() const;
};

/// Bilinear form q(a,b) = 2(a1 b1 + a2 b2) - a0 b3 - a3 b0.
double q_form(const ProjectiveCircle& s, const ProjectiveCircle& t);

/// |q(a,b)| / (|q(a,a)| |q(b,b)|)^{1/2}; equals cosh d for disjoint geodesics.
double inversive_product(const ProjectiveCircle& s, const ProjectiveCircle& t);

/// Point (x, a) of the model X_l.
struct CylinderPoint {
    double x = 0.0;
    double a = 0.0;
};

/// Chordal function 2(cosh d - 1) in X_l (+inf across the two components of X_0).
double sigma(double ell, const CylinderPoint& p1, const CylinderPoint& p2);

double distance(double ell, const CylinderPoint& p1, const CylinderPoint& p2);

/// Isometry X_l -> upper half-plane; for l = 0 the chart (x, 1/|a|).
cplx model_to_halfplane(double ell, const CylinderPoint& p);

/// Inverse of model_to_halfplane for l > 0.
CylinderPoint halfplane_to_model(double ell, cplx z);

double halfplane_distance(cplx z1, cplx z2);

struct Interval {
    double lower = -inf;
    double upper = inf;
};

/// Symmetric collar interval A(t).
Interval collar_interval(double t);

/// One-sided variant (-t/(2 sinh(t/2)), inf) used when building pants.
Interval collar_interval_one_sided(double t);

struct Hexagon {
    std::array<double, 3> lengths{};
    double m = 0.0;
    std::array<ProjectiveCircle, 3> T{};
    std::array<ProjectiveCircle, 3> L{};
    std::array<double, 3> cosh_TL{};
};

/// Right-angled hexagon data with anchors (v1, v2, v3) = (0, 1, inf).
Hexagon hexagon(double l1, double l2, double l3);

} // namespace pinchlab
