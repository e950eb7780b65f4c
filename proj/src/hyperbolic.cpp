#include "pinchlab/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pinchlab {

MobiusMatrix MobiusMatrix::normalized() const {
    const double s = std::sqrt(std::abs(det()));
    if (s == 0.0) throw Error(ErrorKind::Degeneracy, "MobiusMatrix: singular matrix");
    return {a / s, b / s, c / s, d / s};
}

MobiusMatrix MobiusMatrix::inverse() const {
    const double dt = det();
    if (dt == 0.0) throw Error(ErrorKind::Degeneracy, "MobiusMatrix: singular matrix");
    const double s = 1.0 / std::sqrt(std::abs(dt));
    const double sg = dt > 0.0 ? 1.0 : -1.0;
    return {sg * d * s, -sg * b * s, -sg * c * s, sg * a * s};
}

cplx MobiusMatrix::apply(cplx z) const {
    if (std::isinf(z.real()) || std::isinf(z.imag())) {
        return c == 0.0 ? cplx(inf, 0.0) : cplx(a / c, 0.0);
    }
    const cplx den = c * z + d;
    if (den == 0.0) return {inf, 0.0};
    return (a * z + b) / den;
}

IsometryClass classify(const MobiusMatrix& m, double band) {
    const double t = std::abs(m.normalized().trace());
    if (std::abs(t - 2.0) <= band) return IsometryClass::Parabolic;
    return t > 2.0 ? IsometryClass::Hyperbolic : IsometryClass::Elliptic;
}

double translation_length(const MobiusMatrix& m) {
    if (classify(m) != IsometryClass::Hyperbolic) {
        std::ostringstream msg;
        msg << "translation_length: not hyperbolic (|tr| = " << std::abs(m.normalized().trace()) << ")";
        throw Error(ErrorKind::Domain, msg.str());
    }
    const double t = std::abs(m.normalized().trace());
    return 2.0 * std::acosh(0.5 * t);
}

double identity_residual(const MobiusMatrix& m) {
    const MobiusMatrix n = m.normalized();
    const double sg = n.trace() >= 0.0 ? 1.0 : -1.0;
    return std::max({std::abs(n.a - sg), std::abs(n.b), std::abs(n.c), std::abs(n.d - sg)});
}

double ProjectiveCircle::q_self() const { return q_form(*this, *this); }

ProjectiveCircle ProjectiveCircle::normalized() const {
    const double q = q_self();
    if (!(q > 0.0)) throw Error(ErrorKind::Degeneracy, "ProjectiveCircle: not a genuine circle");
    const double s = std::sqrt(2.0 / q);
    ProjectiveCircle out;
    for (int i = 0; i < 4; ++i) out.a[i] = a[i] * s;
    return out;
}

ProjectiveCircle ProjectiveCircle::half_circle(double u1, double u2) {
    if (u1 == u2) throw Error(ErrorKind::Degeneracy, "half_circle: coincident endpoints");
    ProjectiveCircle c;
    c.a = {1.0, 0.5 * (u1 + u2), 0.0, u1 * u2};
    return c.normalized();
}

ProjectiveCircle ProjectiveCircle::vertical_line(double u) {
    ProjectiveCircle c;
    c.a = {0.0, 1.0, 0.0, 2.0 * u};
    return c;
}

MobiusMatrix ProjectiveCircle::reflection() const { return {a[1], -a[3], a[0], -a[1]}; }

std::array<double, 2> ProjectiveCircle::endpoints() const {
    if (a[0] == 0.0) return {a[3] / (2.0 * a[1]), inf};
    const double c = a[1] / a[0];
    const double r2 = c * c - a[3] / a[0];
    if (!(r2 > 0.0)) throw Error(ErrorKind::Degeneracy, "ProjectiveCircle: no real endpoints");
    const double r = std::sqrt(r2);
    return {c - r, c + r};
}

double q_form(const ProjectiveCircle& s, const ProjectiveCircle& t) {
    return 2.0 * (s.a[1] * t.a[1] + s.a[2] * t.a[2]) - s.a[0] * t.a[3] - s.a[3] * t.a[0];
}

double inversive_product(const ProjectiveCircle& s, const ProjectiveCircle& t) {
    const double qs = std::abs(q_form(s, s));
    const double qt = std::abs(q_form(t, t));
    if (qs == 0.0 || qt == 0.0) throw Error(ErrorKind::Degeneracy, "inversive_product: degenerate sphere");
    return std::abs(q_form(s, t)) / (std::sqrt(qs) * std::sqrt(qt));
}

namespace {

void check_point(double ell, const CylinderPoint& p) {
    if (ell < 0.0) throw Error(ErrorKind::Domain, "negative length");
    if (ell == 0.0 && p.a == 0.0) throw Error(ErrorKind::Domain, "X_0 excludes the axis a = 0");
}

} // namespace

double sigma(double ell, const CylinderPoint& p1, const CylinderPoint& p2) {
    check_point(ell, p1);
    check_point(ell, p2);
    const double dx = p1.x - p2.x;
    const double da = p1.a - p2.a;
    const double prod = p1.a * p2.a;
    if (ell == 0.0) {
        if (prod < 0.0) return inf;
        return da * da / prod + prod * dx * dx;
    }
    const double l2 = ell * ell;
    const double rr = std::sqrt((l2 + p1.a * p1.a) * (l2 + p2.a * p2.a));
    const double sh = std::sinh(0.5 * ell * dx);
    return 4.0 * rr * sh * sh / l2 + 2.0 * da * da / (rr + prod + l2);
}

double distance(double ell, const CylinderPoint& p1, const CylinderPoint& p2) {
    const double s = sigma(ell, p1, p2);
    if (std::isinf(s)) return inf;
    return 2.0 * std::asinh(0.5 * std::sqrt(s));
}

cplx model_to_halfplane(double ell, const CylinderPoint& p) {
    check_point(ell, p);
    if (ell == 0.0) return {p.x, 1.0 / std::abs(p.a)};
    const double rho = std::hypot(ell, p.a);
    const double e = std::exp(ell * p.x);
    return {e * p.a / rho, e * ell / rho};
}

CylinderPoint halfplane_to_model(double ell, cplx z) {
    if (!(ell > 0.0)) throw Error(ErrorKind::Domain, "halfplane_to_model needs l > 0");
    if (!(z.imag() > 0.0)) throw Error(ErrorKind::Domain, "halfplane_to_model: point not in the upper half-plane");
    return {std::log(std::abs(z)) / ell, ell * z.real() / z.imag()};
}

double halfplane_distance(cplx z1, cplx z2) {
    const double num = std::abs(z1 - z2);
    const double den = 2.0 * std::sqrt(z1.imag() * z2.imag());
    return 2.0 * std::asinh(num / den);
}

Interval collar_interval(double t) {
    if (t < 0.0) throw Error(ErrorKind::Domain, "collar_interval: negative length");
    if (t == 0.0) return {-1.0, 1.0};
    const double w = t / (2.0 * std::sinh(0.5 * t));
    return {-w, w};
}

Interval collar_interval_one_sided(double t) {
    const Interval s = collar_interval(t);
    return {s.lower, inf};
}

Hexagon hexagon(double l1, double l2, double l3) {
    if (l1 < 0.0 || l2 < 0.0 || l3 < 0.0) throw Error(ErrorKind::Domain, "hexagon: negative length");
    Hexagon h;
    h.lengths = {l1, l2, l3};
    std::array<double, 3> c{};
    for (int i = 0; i < 3; ++i) c[i] = std::cosh(0.5 * h.lengths[i]);
    h.m = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + 2.0 * c[0] * c[1] * c[2] - 1.0);
    for (int i = 0; i < 3; ++i) h.cosh_TL[i] = (h.m + c[(i + 2) % 3] - c[(i + 1) % 3]) / (c[i] + 1.0);
    const auto& ct = h.cosh_TL;
    h.T[0].a = {ct[0] + 1.0, 1.0, 0.0, 0.0};
    h.T[1].a = {ct[1] - 1.0, ct[1], 0.0, ct[1] + 1.0};
    h.T[2].a = {0.0, 1.0, 0.0, 1.0 - ct[2]};
    h.L[0] = ProjectiveCircle::vertical_line(1.0);
    h.L[1] = ProjectiveCircle::vertical_line(0.0);
    h.L[2] = ProjectiveCircle::half_circle(0.0, 1.0);
    return h;
}

} // namespace pinchlab
