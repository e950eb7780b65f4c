#include "pinchlab/scattering.hpp"

#include <cmath>
#include <sstream>

#include "pinchlab/hyperbolic.hpp"

namespace pinchlab {

namespace {

const double sqrt_pi = std::sqrt(pi);

void guard_near(cplx s, cplx p, const char* where, const char* what) {
    if (std::abs(s - p) < pole_guard) {
        std::ostringstream msg;
        msg << where << ": s=" << s << " within " << pole_guard << " of the " << what << " " << p.real();
        throw Error(ErrorKind::PoleProximity, msg.str());
    }
}

// s in -1/2 - N_0: poles of h(l,s)
void guard_mode_pole(cplx s, const char* where) {
    if (s.real() < -0.5 + pole_guard) {
        const double k = std::round(-0.5 - s.real());
        guard_near(s, -0.5 - k, where, "pole of h at");
    }
}

// s - 1/2 in Z: zeros of cos(pi s)
void guard_half_integer(cplx s, const char* where) {
    guard_near(s, std::round(s.real() - 0.5) + 0.5, where, "half-integer");
}

// s in -N_0: poles of Gamma(s)
void guard_gamma_pole(cplx s, const char* where) {
    if (s.real() < pole_guard) guard_near(s, std::round(s.real()), where, "Gamma pole at");
}

cplx cpow(double base, cplx e) { return std::exp(e * std::log(base)); }

struct ConnectionWeights {
    cplx A, B, C, G1, G2;
};

ConnectionWeights weights(double ell, cplx s, int n) {
    const cplx ik(0.0, pi * n / ell);
    ConnectionWeights w;
    w.A = 0.5 * s - ik;
    w.B = 0.5 * s + ik;
    w.C = 0.5 + s;
    const cplx gc = gamma(w.C);
    w.G1 = gc * sqrt_pi * rgamma(w.C - w.A) * rgamma(w.C - w.B);
    w.G2 = gc * (-2.0 * sqrt_pi) * rgamma(w.A) * rgamma(w.B);
    return w;
}

// expansion about a = 0; sig(a) = -a/sqrt(l^2+a^2) continues |a|/sqrt(l^2+a^2) across 0
ModeValue about_geodesic(double ell, cplx s, int n, double a) {
    const ConnectionWeights w = weights(ell, s, n);
    const double l2 = ell * ell;
    const double R = l2 + a * a;
    const double y = a * a / R;
    const double sig = -a / std::sqrt(R);
    const double dy = 2.0 * a * l2 / (R * R);
    const double dsig = -l2 / (R * std::sqrt(R));
    const cplx F1 = hyp2f1(w.A, w.B, 0.5, y);
    const cplx dF1 = hyp2f1_derivative(w.A, w.B, 0.5, y);
    const cplx F2 = hyp2f1(w.C - w.A, w.C - w.B, 1.5, y);
    const cplx dF2 = hyp2f1_derivative(w.C - w.A, w.C - w.B, 1.5, y);
    const cplx pref = cpow(R, -0.5 * s);
    const cplx bracket = w.G1 * F1 + w.G2 * sig * F2;
    const cplx dbracket = w.G1 * dF1 * dy + w.G2 * (dsig * F2 + sig * dF2 * dy);
    return {pref * bracket, -s * a / R * pref * bracket + pref * dbracket};
}

// power series in x = l^2/(l^2+a^2)
ModeValue away_from_geodesic(double ell, cplx s, int n, double a) {
    const cplx ik(0.0, pi * n / ell);
    const cplx A = 0.5 * s - ik, B = 0.5 * s + ik, C = 0.5 + s;
    const double l2 = ell * ell;
    const double R = l2 + a * a;
    const double x = l2 / R;
    const cplx F = hyp2f1(A, B, C, x);
    const cplx dF = hyp2f1_derivative(A, B, C, x);
    const cplx pref = cpow(R, -0.5 * s);
    return {pref * F, -s * a / R * pref * F + pref * dF * (-2.0 * a * l2 / (R * R))};
}

constexpr double series_limit = 0.8;
constexpr double connection_limit = 0.98;
// the expansion about the geodesic cancels badly for n != 0
constexpr double nonzero_mode_limit = 0.9999;

} // namespace

ModeValue mode(double ell, cplx s, int n, double a) {
    if (!(a < 0.0)) throw Error(ErrorKind::Domain, "mode_function: requires a < 0");
    if (!(ell >= 0.0)) throw Error(ErrorKind::Domain, "mode_function: requires l >= 0");
    if (n != 0 && ell == 0.0) throw Error(ErrorKind::Domain, "mode_function: n != 0 requires l > 0");
    guard_mode_pole(s, "mode_function");
    if (ell == 0.0) {
        const cplx v = cpow(-a, -s);
        return {v, s * v / (-a)};
    }
    const double x = ell * ell / (ell * ell + a * a);
    if (x <= series_limit || (n != 0 && x <= nonzero_mode_limit)) return away_from_geodesic(ell, s, n, a);
    return about_geodesic(ell, s, n, a);
}

cplx mode_function(double ell, cplx s, int n, double a) { return mode(ell, s, n, a).value; }

cplx mode_derivative(double ell, cplx s, int n, double a) { return mode(ell, s, n, a).derivative; }

ModeValue mode_continued(double ell, cplx s, double a) {
    if (!(ell > 0.0)) throw Error(ErrorKind::Domain, "mode_continued: requires l > 0");
    guard_mode_pole(s, "mode_continued");
    const double y = a * a / (ell * ell + a * a);
    if (a < 0.0 && y >= 1.0 - series_limit) return away_from_geodesic(ell, s, 0, a);
    if (y <= connection_limit) return about_geodesic(ell, s, 0, a);
    const Connection c = connection_coefficients(ell, s);
    const cplx lp = cpow(ell, 1.0 - 2.0 * s);
    const ModeValue hs = mode(ell, s, 0, -a);
    const ModeValue h1 = mode(ell, 1.0 - s, 0, -a);
    return {c.alpha * hs.value + lp * c.beta * h1.value, -(c.alpha * hs.derivative + lp * c.beta * h1.derivative)};
}

cplx eigen_center(double ell, cplx s, double a) {
    if (!(ell > 0.0)) throw Error(ErrorKind::Domain, "eigen_center: requires l > 0");
    guard_mode_pole(s, "eigen_center");
    const double z = -a * a / (ell * ell);
    const cplx g = gamma(0.5 + s);
    const cplx even = cpow(ell, -s) * sqrt_pi * g * rgamma(0.5 + 0.5 * s) * rgamma(0.5 + 0.5 * s) *
                      hyp2f1(0.5 * s, 0.5 - 0.5 * s, 0.5, z);
    const cplx odd = cpow(ell, -(1.0 + s)) * (-2.0 * sqrt_pi) * g * rgamma(0.5 * s) * rgamma(0.5 * s) * a *
                     hyp2f1(0.5 + 0.5 * s, 1.0 - 0.5 * s, 1.5, z);
    return even - odd;
}

cplx wronskian(double ell, cplx s1, cplx s2, double a) {
    const ModeValue u = mode(ell, s1, 0, a);
    const ModeValue v = mode(ell, s2, 0, a);
    return u.value * v.derivative - u.derivative * v.value;
}

Connection connection_coefficients(double ell, cplx s) {
    if (!(ell > 0.0)) throw Error(ErrorKind::Domain, "connection_coefficients: requires l > 0");
    guard_half_integer(s, "connection_coefficients");
    const cplx g = gamma(0.5 + s);
    const cplx rg = rgamma(s);
    return {1.0 / std::cos(pi * s), cpow(4.0, s) * g * g * rg * rg / (2.0 * s - 1.0)};
}

cplx eigen_right(double ell, cplx s, double a) {
    if (!(a > 0.0)) throw Error(ErrorKind::Domain, "eigen_right: requires a > 0");
    const Connection c = connection_coefficients(ell, s);
    return c.alpha * mode_function(ell, s, 0, -a) + cpow(ell, 1.0 - 2.0 * s) * c.beta * mode_function(ell, 1.0 - s, 0, -a);
}

CDPair extract_CD(cplx F0, cplx dF0, double ell, cplx s, double a) {
    guard_near(s, 0.5, "extract_CD", "point");
    const ModeValue hs = mode(ell, s, 0, a);
    const ModeValue h1 = mode(ell, 1.0 - s, 0, a);
    const cplx f = (ell * ell + a * a) / (1.0 - 2.0 * s);
    return {f * (h1.derivative * F0 - h1.value * dF0), f * (-hs.derivative * F0 + hs.value * dF0)};
}

CDPair extract_CD(const ConstantModeProfile& profile, double ell, cplx s, double a_eval) {
    const std::size_t n = profile.a.size();
    if (n == 0 || profile.F0.size() != n || profile.dF0.size() != n)
        throw Error(ErrorKind::Domain, "extract_CD: profile arrays are empty or of unequal length");
    for (std::size_t i = 0; i < n; ++i) {
        if (profile.a[i] >= 0.0 || (i > 0 && profile.a[i] <= profile.a[i - 1]))
            throw Error(ErrorKind::Domain, "extract_CD: grid must be negative and strictly increasing");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(profile.a[i] - a_eval) <= 1e-12 * std::max(1.0, std::abs(a_eval)))
            return extract_CD(profile.F0[i], profile.dF0[i], ell, s, profile.a[i]);
    }
    throw Error(ErrorKind::Domain, "extract_CD: a_eval is not a node of the profile grid");
}

CMatrix sigma_matrix(const std::vector<int>& iota, cplx s) {
    const int n = static_cast<int>(iota.size());
    for (int i = 0; i < n; ++i) {
        if (iota[i] < 0 || iota[i] >= n || iota[iota[i]] != i)
            throw Error(ErrorKind::Domain, "sigma_matrix: iota is not an involution of the end set");
    }
    guard_half_integer(s, "sigma_matrix");
    const cplx sec = 1.0 / std::cos(pi * s);
    CMatrix m = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = sec;
        if (iota[i] != i) m(i, iota[i]) = 1.0;
    }
    return m;
}

CMatrix lambda_power(const std::vector<double>& ell, cplx s) {
    const int n = static_cast<int>(ell.size());
    CMatrix m = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (ell[i] < 0.0) throw Error(ErrorKind::Domain, "lambda_power: negative length");
        if (ell[i] > 0.0) m(i, i) = cpow(ell[i], 2.0 * s - 1.0);
    }
    return m;
}

cplx d_factor(cplx s) {
    guard_gamma_pole(s, "d_factor");
    const cplx g = gamma(s);
    const cplx r = rgamma(0.5 + s);
    return (2.0 * s - 1.0) * cpow(4.0, -s) * g * g * r * r;
}

CMatrix d_from_c(const CMatrix& C, const std::vector<int>& iota, const std::vector<double>& ell, cplx s) {
    const auto n = static_cast<Eigen::Index>(iota.size());
    if (C.rows() != n || C.cols() != n || static_cast<Eigen::Index>(ell.size()) != n)
        throw Error(ErrorKind::Domain, "d_from_c: dimension mismatch");
    return CMatrix::Identity(n, n) + d_factor(s) * C * sigma_matrix(iota, s) * lambda_power(ell, s);
}

double Cutoff::value(double a) const {
    if (a <= -2.0 * eps) return 0.0;
    if (a >= -eps) return 1.0;
    const double t = (a + 2.0 * eps) / eps;
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double Cutoff::d1(double a) const {
    if (a <= -2.0 * eps || a >= -eps) return 0.0;
    const double t = (a + 2.0 * eps) / eps;
    return 30.0 * t * t * (1.0 - t) * (1.0 - t) / eps;
}

double Cutoff::d2(double a) const {
    if (a <= -2.0 * eps || a >= -eps) return 0.0;
    const double t = (a + 2.0 * eps) / eps;
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (eps * eps);
}

double default_cutoff_width(double ell) { return 0.3 * collar_interval(ell).upper; }

CylinderEisenstein::CylinderEisenstein(double ell, cplx s, const CylinderOptions& opts)
    : ell_(ell), s_(s), tol_(opts.tol) {
    if (!(ell > 0.0)) throw Error(ErrorKind::Domain, "cylinder_scattering: requires l > 0");
    if (!(s.real() > 0.5)) throw Error(ErrorKind::Domain, "cylinder_scattering: requires Re s > 1/2");
    chi_.eps = opts.eps > 0.0 ? opts.eps : default_cutoff_width(ell);
    if (2.0 * chi_.eps > collar_interval(ell).upper)
        throw Error(ErrorKind::Domain, "cylinder_scattering: cut-off support leaves the collar");

    const ModeValue m0 = mode_continued(ell, s, 0.0);
    // u_+(a) = u_-(-a): at a = 0 the derivative flips sign
    pw_ = ell * ell * (m0.value * -m0.derivative - m0.derivative * m0.value);

    // K_- vanishes analytically, so the tolerance is absolute, relative to the integrand size
    const double lo = -2.0 * chi_.eps, hi = -chi_.eps;
    double size = 0.0;
    for (int k = 0; k <= 16; ++k) {
        const double b = lo + (hi - lo) * k / 16.0;
        size = std::max(size, std::abs(source(b)) * std::max(std::abs(mode_continued(ell, s, b).value),
                                                              std::abs(mode_continued(ell, s, -b).value)));
    }
    spec_.relative_tolerance = tol_;
    spec_.absolute_tolerance = std::max(tol_ * size * (hi - lo), 1e-300);
    k_minus_ = integrate([&](double b) { return mode_continued(ell_, s_, b).value * source(b); }, lo, hi, spec_).value / pw_;
    k_plus_ = integrate([&](double b) { return mode_continued(ell_, s_, -b).value * source(b); }, lo, hi, spec_).value / pw_;
}

// [L, chi] h with L = d/da (l^2+a^2) d/da + s(1-s)
cplx CylinderEisenstein::source(double b) const {
    const ModeValue h = mode(ell_, s_, 0, b);
    const double p = ell_ * ell_ + b * b;
    return p * (chi_.d2(b) * h.value + 2.0 * chi_.d1(b) * h.derivative) + 2.0 * b * chi_.d1(b) * h.value;
}

ModeValue CylinderEisenstein::operator()(double a) const {
    if (a == 0.0) throw Error(ErrorKind::Domain, "cylinder Eisenstein function: jump at a = 0");
    const double e = chi_.eps;
    if (a >= -e) {
        const ModeValue up = mode_continued(ell_, s_, -a);
        ModeValue out{-up.value * k_minus_, up.derivative * k_minus_};
        if (a < 0.0) {
            const ModeValue h = mode(ell_, s_, 0, a);
            out.value += h.value;
            out.derivative += h.derivative;
        }
        return out;
    }
    if (a <= -2.0 * e) {
        const ModeValue um = mode_continued(ell_, s_, a);
        return {-um.value * k_plus_, -um.derivative * k_plus_};
    }
    const cplx i_minus =
        integrate([&](double b) { return mode_continued(ell_, s_, b).value * source(b); }, -2.0 * e, a, spec_).value;
    const cplx i_plus =
        integrate([&](double b) { return mode_continued(ell_, s_, -b).value * source(b); }, a, -e, spec_).value;
    const ModeValue um = mode_continued(ell_, s_, a);
    ModeValue up = mode_continued(ell_, s_, -a);
    up.derivative = -up.derivative;
    const ModeValue h = mode(ell_, s_, 0, a);
    return {chi_.value(a) * h.value - (um.value * i_plus + up.value * i_minus) / pw_,
            chi_.d1(a) * h.value + chi_.value(a) * h.derivative - (um.derivative * i_plus + up.derivative * i_minus) / pw_};
}

namespace {

// integral over (-inf, -A] of f, split at the cut-off breakpoints
cplx integrate_left(const std::function<cplx(double)>& f, double A, double eps, double tol) {
    QuadratureSpec spec;
    spec.relative_tolerance = tol;
    spec.absolute_tolerance = 1e-300;
    std::vector<double> cuts{-A};
    for (double c : {-eps, -2.0 * eps})
        if (c < -A) cuts.push_back(c);
    cplx total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) total += integrate(f, cuts[k + 1], cuts[k], spec).value;
    const double b = cuts.back();
    total += integrate([&](double t) { return f(-t); }, -b, inf, spec).value;
    return total;
}

} // namespace

cplx CylinderEisenstein::product_integral(const CylinderEisenstein& other, double A) const {
    if (!(A > 0.0)) throw Error(ErrorKind::Domain, "product_integral: requires A > 0");
    return integrate_left([&](double a) { return (*this)(a).value * other(a).value; }, A,
                          std::max(chi_.eps, other.chi_.eps), std::max(tol_, other.tol_) * 10.0);
}

ScatteringPair cylinder_scattering(double ell, cplx s, const CylinderOptions& opts) {
    const CylinderEisenstein minus(ell, s, opts);
    const double a_eval = -0.5 * minus.cutoff().eps;
    ScatteringPair pair;
    pair.ends = {"-", "+"};
    pair.iota = {1, 0};
    pair.ell = {ell, ell};
    pair.s = s;
    pair.C = CMatrix::Zero(2, 2);
    pair.D = CMatrix::Zero(2, 2);
    // E_+(a) = E_-(-a); end "+" reads the function in the flipped coordinate b = -a
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double sign = (i == j) ? 1.0 : -1.0;
            const ModeValue e = minus(sign * a_eval);
            const CDPair cd = extract_CD(e.value, sign * e.derivative, ell, s, a_eval);
            pair.C(i, j) = cd.C;
            pair.D(i, j) = cd.D;
        }
    }
    return pair;
}

cplx maass_selberg_rhs(const CMatrix& C, const CMatrix& D, const CMatrix& Cp, const CMatrix& Dp,
                       const std::vector<double>& ell, cplx s, cplx sp, double A, int i, int j) {
    cplx total = 0.0;
    for (std::size_t e = 0; e < ell.size(); ++e) {
        const auto ee = static_cast<Eigen::Index>(e);
        const double l = ell[e];
        const double w = l * l + A * A;
        total += w * (D(i, ee) * Dp(j, ee) * wronskian(l, s, sp, -A) + D(i, ee) * Cp(j, ee) * wronskian(l, s, 1.0 - sp, -A) +
                      C(i, ee) * Dp(j, ee) * wronskian(l, 1.0 - s, sp, -A) +
                      C(i, ee) * Cp(j, ee) * wronskian(l, 1.0 - s, 1.0 - sp, -A));
    }
    return total;
}

MaassSelbergCheck maass_selberg_residual(double ell, cplx s, cplx sp, double A, int i, int j,
                                         const CylinderOptions& opts) {
    if (i < 0 || i > 1 || j < 0 || j > 1) throw Error(ErrorKind::Domain, "maass_selberg_residual: end index must be 0 or 1");
    const CylinderEisenstein es(ell, s, opts);
    const CylinderEisenstein esp(ell, sp, opts);
    if (!(A > 0.0 && A < std::min(es.cutoff().eps, esp.cutoff().eps)))
        throw Error(ErrorKind::Domain, "maass_selberg_residual: requires 0 < A < cut-off width");
    const ScatteringPair p = cylinder_scattering(ell, s, opts);
    const ScatteringPair q = cylinder_scattering(ell, sp, opts);

    // E_i on the truncated cylinder |a| > A; E_+(a) = E_-(-a)
    const double eps = std::max(es.cutoff().eps, esp.cutoff().eps);
    const double tol = 10.0 * opts.tol;
    auto side = [&](int end, const CylinderEisenstein& e, double a) { return end == 0 ? e(a).value : e(-a).value; };
    const cplx left = integrate_left([&](double a) { return side(i, es, a) * side(j, esp, a); }, A, eps, tol);
    const cplx right = integrate_left([&](double a) { return side(i, es, -a) * side(j, esp, -a); }, A, eps, tol);

    MaassSelbergCheck out;
    out.lhs = (s * (1.0 - s) - sp * (1.0 - sp)) * (left + right);
    out.rhs = maass_selberg_rhs(p.C, p.D, q.C, q.D, p.ell, s, sp, A, i, j);
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

CMatrix cprime(const CMatrix& C, const CMatrix& D) {
    if (C.rows() != D.rows() || D.rows() != D.cols() || C.cols() != D.cols())
        throw Error(ErrorKind::Domain, "cprime: dimension mismatch");
    Eigen::JacobiSVD<CMatrix> svd(D);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-12 * sv(0)))
        throw Error(ErrorKind::SingularMatrix, "cprime: D is numerically singular");
    return D.fullPivLu().solve(C);
}

IdentityReport identity_residuals(const ScatteringPair& at_s, const ScatteringPair* at_one_minus_s, bool finite_area) {
    IdentityReport r;
    r.finite_area = finite_area;
    const CMatrix& C = at_s.C;
    const CMatrix& D = at_s.D;
    const CMatrix cp = cprime(C, D);
    r.cprime_symmetry = (cp - cp.transpose()).norm();
    r.c_symmetry = (C - C.transpose()).norm();
    r.cd_commutation = (C * D.transpose() - D * C.transpose()).norm();
    const CMatrix sl = sigma_matrix(at_s.iota, at_s.s) * lambda_power(at_s.ell, at_s.s);
    r.d_antisymmetric = (D - D.transpose() - d_factor(at_s.s) * (C * sl - sl * C)).norm();
    if (at_one_minus_s) {
        const CMatrix& C1 = at_one_minus_s->C;
        const CMatrix& D1 = at_one_minus_s->D;
        r.functional_dd_cc = (D * D1.transpose() - C * C1).norm();
        const CMatrix cp1 = cprime(C1, D1);
        r.cprime_functional = (cp1 * cp - CMatrix::Identity(C.rows(), C.cols())).norm();
    }
    if (std::abs(at_s.s.real() - 0.5) < 1e-12)
        r.unitarity = (cp.adjoint() * cp - CMatrix::Identity(C.rows(), C.cols())).norm();
    return r;
}

CMatrix lhp_c_asymptote(const std::vector<double>& ell, const std::vector<int>& iota, cplx s) {
    if (!(s.real() < 0.5)) throw Error(ErrorKind::Domain, "lhp_c_asymptote: requires Re s < 1/2");
    const cplx t = 1.0 - s;
    return d_factor(t) * lambda_power(ell, t) * sigma_matrix(iota, t);
}

} // namespace pinchlab
