#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "pinchlab/scattering.hpp"

using namespace pinchlab;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// second derivative by Richardson-extrapolated central differences of the analytic first derivative
cplx second_derivative(double ell, cplx s, int n, double a) {
    auto d = [&](double h) { return (mode_derivative(ell, s, n, a + h) - mode_derivative(ell, s, n, a - h)) / (2.0 * h); };
    const double h = 3e-4 * std::min(1.0, std::abs(a));
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

cplx ode_residual(double ell, cplx s, int n, double a) {
    const double p = ell * ell + a * a;
    const double four_pi2 = 4.0 * pi * pi;
    return p * second_derivative(ell, s, n, a) + 2.0 * a * mode_derivative(ell, s, n, a) +
           (s * (1.0 - s) - four_pi2 * n * n / p) * mode_function(ell, s, n, a);
}

// constant-mode ODE (p u')' = -s(1-s) u, state (Re u, Im u, Re pu', Im pu')
using State = std::array<double, 4>;

State integrate_mode_ode(double ell, cplx s, State y, double from, double to) {
    namespace odeint = boost::numeric::odeint;
    const cplx lam = s * (1.0 - s);
    auto rhs = [&](const State& x, State& dx, double a) {
        const double p = ell * ell + a * a;
        const cplx u(x[0], x[1]), v(x[2], x[3]);
        const cplx du = v / p, dv = -lam * u;
        dx = {du.real(), du.imag(), dv.real(), dv.imag()};
    };
    auto stepper = odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_adaptive(stepper, rhs, y, from, to, (to - from) * 1e-3);
    return y;
}

State mode_state(double ell, cplx s, double a) {
    const ModeValue m = mode_continued(ell, s, a);
    const cplx v = (ell * ell + a * a) * m.derivative;
    return {m.value.real(), m.value.imag(), v.real(), v.imag()};
}

} // namespace

TEST_CASE("mode function oracle values") {
    struct Ref {
        double ell;
        cplx s;
        int n;
        double a;
        cplx value, derivative;
    };
    // mpmath, 30 digits
    const Ref refs[] = {
        {1, {1.2, 0.5}, 0, -1.5, {0.51334788413858642402, -0.13343628874915294578}, {0.36057318821500759139, 0.056232625462284191275}},
        {1, {1.2, 0.5}, 2, -1.5, {27.435616375160692354, -31.168086682275220706}, {107.07725875329145304, -119.62338269516093233}},
        {0.5, 0.8, 1, -0.7, {248.30033093934440671, 0.0}, {2104.6521006939103281, 0.0}},
        {1, {1.3, 0.4}, 0, -0.2, {1.5384774881189065244, 0.28412926370882831817}, {1.3813578061724579738, 0.84224425420660294069}},
        {0.3, {2, -1}, 0, -0.01, {-8.4064986075017143421, -30.183459112380009894}, {-141.69298847231830211, -130.93472317876607074}},
        {2, 0.7, 0, -0.5, {0.72875049029644668915, 0.0}, {0.16445037963725695428, 0.0}},
        {0.7, {1.3, 0.4}, 1, -0.1, {19515.787858450854905, -7053.8062548433012524}, {245976.98825462880766, -87758.239720181036654}},
        {0, 0.8, 0, -2, {0.57434917749851748572, 0.0}, {0.22973967099940700704, 0.0}},
    };
    for (const auto& r : refs) {
        const ModeValue m = mode(r.ell, r.s, r.n, r.a);
        CHECK(std::abs(m.value - r.value) < 1e-12 * std::abs(r.value));
        CHECK(std::abs(m.derivative - r.derivative) < 1e-12 * std::abs(r.derivative));
    }
    // nonzero modes close to the geodesic
    CHECK(rel(mode_function(2.0, {0.7, 0.3}, 3, -0.999), {1276.2822586849438526, -1205.2344696117490369}) < 1e-12);
    CHECK(rel(mode_function(1.0, {1.2, 0.5}, 4, -0.3), {416139778041.98156084, -939257957897.50542215}) < 1e-12);
    CHECK(rel(mode_function(0.7, {1.3, 0.4}, 1, -0.01), {61560.363577360275686, -21927.495946644682439}) < 1e-12);
}

TEST_CASE("mode function limits and ODE") {
    CHECK(std::abs(mode_function(0.0, 0.8, 0, -2.0) - std::pow(2.0, -0.8)) < 1e-15);
    const double d01 = std::abs(mode_function(0.01, 0.8, 0, -1.0) - mode_function(0.0, 0.8, 0, -1.0));
    const double d1 = std::abs(mode_function(0.1, 0.8, 0, -1.0) - mode_function(0.0, 0.8, 0, -1.0));
    CHECK(d01 < 1e-3);
    CHECK(d01 < d1);
    CHECK(mode_function(1.0, {0.6, 0.2}, 0, -0.7) == mode(1.0, {0.6, 0.2}, 0, -0.7).value);

    CHECK(std::abs(ode_residual(1.0, {1.2, 0.5}, 2, -1.5)) < 1e-8);
    struct P {
        double ell;
        cplx s;
        int n;
        double a;
    };
    // both the series and the expansion about the geodesic
    for (const P& p : {P{1.0, {1.2, 0.5}, 0, -0.3}, P{0.5, {0.9, -1.0}, 0, -2.0}, P{0.3, {2.0, 0.0}, 0, -0.05},
                       P{1.0, {1.2, 0.5}, 1, -0.4}, P{2.0, {0.7, 0.3}, 3, -1.0}, P{0.8, {1.5, 0.0}, 0, -0.5}})
        CHECK(std::abs(ode_residual(p.ell, p.s, p.n, p.a)) < 1e-8 * std::max(1.0, std::abs(mode_function(p.ell, p.s, p.n, p.a))));

    // both evaluation routes agree at the switch l^2/(l^2+a^2) = 0.8
    const double a_switch = -0.5;
    for (double da : {-1e-9, 1e-9}) {
        const ModeValue m = mode(1.0, {1.1, 0.7}, 0, a_switch + da);
        const ModeValue c = mode_continued(1.0, {1.1, 0.7}, a_switch + da);
        CHECK(rel(m.value, c.value) < 1e-13);
    }
    CHECK(rel(mode_continued(1.0, {1.1, 0.7}, -0.49).value, mode(1.0, {1.1, 0.7}, 0, -0.49).value) < 1e-13);
    CHECK(rel(mode_continued(1.0, {1.1, 0.7}, -0.51).value, mode(1.0, {1.1, 0.7}, 0, -0.51).value) < 1e-13);
}

TEST_CASE("mode function errors") {
    CHECK_THROWS_AS(mode_function(1.0, 0.8, 0, 0.0), Error);
    CHECK_THROWS_AS(mode_function(1.0, 0.8, 0, 0.3), Error);
    CHECK_THROWS_AS(mode_function(0.0, 0.8, 1, -1.0), Error);
    CHECK_THROWS_AS(mode_function(-1.0, 0.8, 0, -1.0), Error);
    try {
        mode_function(1.0, -1.5 + 1e-8, 0, -1.0);
        FAIL("expected a pole error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PoleProximity);
    }
    CHECK_NOTHROW(mode_function(1.0, -1.5 + 1e-4, 0, -1.0));
}

TEST_CASE("eigen center") {
    CHECK(rel(eigen_center(0.5, 1.1, -0.4), mode_function(0.5, 1.1, 0, -0.4)) < 1e-8);
    for (double ell : {0.7, 1.0, 2.0})
        for (cplx s : {cplx(0.8, 0.3), cplx(1.3, -0.6), cplx(2.2, 0.0)})
            for (double a : {-0.6, -0.3, -0.05}) CHECK(rel(eigen_center(ell, s, a), mode_function(ell, s, 0, a)) < 1e-12);
    // the same formula continues h across the geodesic
    CHECK(rel(eigen_center(1.0, {0.8, 0.3}, 0.4), mode_continued(1.0, {0.8, 0.3}, 0.4).value) < 1e-12);
}

TEST_CASE("wronskian") {
    const cplx s(1.3, 0.4);
    CHECK(std::abs((0.49 + 0.81) * wronskian(0.7, s, 1.0 - s, -0.9) - (1.0 - 2.0 * s)) < 1e-8);
    for (double ell : {0.1, 0.5, 1.0, 2.0})
        for (double a : {-2.0, -1.0, -0.3})
            for (cplx t : {cplx(0.7, 0.0), cplx(1.3, 0.8), cplx(2.0, 0.0)})
                CHECK(std::abs((ell * ell + a * a) * wronskian(ell, t, 1.0 - t, a) - (1.0 - 2.0 * t)) < 1e-8);
    CHECK(std::abs(wronskian(0.7, s, s, -0.9)) < 1e-15);
    const cplx s1(1.2, 0.3), s2(0.6, -0.2);
    CHECK(std::abs(wronskian(0.7, s1, s2, -0.9) + wronskian(0.7, s2, s1, -0.9)) < 1e-15);
    // Abel: (l^2+a^2) w(s, 1-s) is constant in a, including across the switch of evaluation route
    const cplx w0 = (0.49 + 4.0) * wronskian(0.7, s1, 1.0 - s1, -2.0);
    for (double a = -2.0; a <= -0.05 + 1e-12; a += 0.15)
        CHECK(std::abs((0.49 + a * a) * wronskian(0.7, s1, 1.0 - s1, a) - w0) < 1e-10 * std::abs(w0));
    // and (l^2+a^2) w(s1, s2) has derivative (s1(1-s1) - s2(1-s2)) h(s1) h(s2)
    {
        const double a = -0.9, d = 1e-3;
        auto pw = [&](double b) { return (0.49 + b * b) * wronskian(0.7, s1, s2, b); };
        const cplx lhs = (pw(a + d) - pw(a - d)) / (2.0 * d);
        const cplx rhs = (s1 * (1.0 - s1) - s2 * (1.0 - s2)) * mode_function(0.7, s1, 0, a) * mode_function(0.7, s2, 0, a);
        CHECK(std::abs(lhs - rhs) < 1e-5 * std::abs(rhs));
    }
}

TEST_CASE("connection coefficients") {
    const cplx s(0.8, 0.3);
    const Connection c = connection_coefficients(1.0, s);
    CHECK(std::abs(connection_coefficients(1.0, 1.0 - s).alpha + c.alpha) < 1e-14 * std::abs(c.alpha));
    CHECK(std::abs(c.beta - std::pow(4.0, s) * gamma(0.5 + s) * gamma(0.5 + s) / ((2.0 * s - 1.0) * gamma(s) * gamma(s))) <
          1e-13 * std::abs(c.beta));

    // independent ODE integration from a = -2 across the geodesic
    const State y0 = mode_state(1.0, s, -2.0);
    const State y1 = integrate_mode_ode(1.0, s, y0, -2.0, 2.0);
    const cplx u_ode(y1[0], y1[1]);
    CHECK(std::abs(u_ode - eigen_right(1.0, s, 2.0)) < 1e-7);
    CHECK(std::abs(u_ode - mode_continued(1.0, s, 2.0).value) < 1e-7);
    for (double a : {-0.5, 0.0, 0.3, 1.0, 5.0}) {
        const State y = integrate_mode_ode(1.0, s, y0, -2.0, a);
        const ModeValue m = mode_continued(1.0, s, a);
        CHECK(std::abs(cplx(y[0], y[1]) - m.value) < 1e-9 * std::max(1.0, std::abs(m.value)));
        CHECK(std::abs(cplx(y[2], y[3]) - (1.0 + a * a) * m.derivative) < 1e-9 * std::max(1.0, std::abs(m.value)));
    }
    // eigen right reproduced by the expansion about the geodesic for a > 0
    for (double ell : {0.4, 1.0})
        for (cplx t : {cplx(1.3, 0.2), cplx(0.7, -0.5)})
            for (double a : {0.1, 0.5, 1.0}) CHECK(rel(eigen_right(ell, t, a), mode_continued(ell, t, a).value) < 1e-11);

    CHECK_THROWS_AS(connection_coefficients(1.0, 1.5), Error);
    CHECK_THROWS_AS(connection_coefficients(1.0, 0.5), Error);
    CHECK_THROWS_AS(connection_coefficients(0.0, 0.8), Error);
}

TEST_CASE("extract C and D") {
    const double ell = 0.8;
    const cplx s(1.2, 0.4);
    auto synth = [&](cplx D, cplx C, double a) {
        const ModeValue h = mode(ell, s, 0, a), g = mode(ell, 1.0 - s, 0, a);
        return ModeValue{D * h.value + C * g.value, D * h.derivative + C * g.derivative};
    };
    const ModeValue pure = synth(1.0, 0.0, -0.7);
    const CDPair p = extract_CD(pure.value, pure.derivative, ell, s, -0.7);
    CHECK(std::abs(p.D - 1.0) < 1e-12);
    CHECK(std::abs(p.C) < 1e-12);

    ConstantModeProfile prof;
    for (double a : {-1.5, -1.0, -0.5, -0.2}) {
        const ModeValue m = synth({2.0, 1.0}, -0.5, a);
        prof.a.push_back(a);
        prof.F0.push_back(m.value);
        prof.dF0.push_back(m.derivative);
    }
    for (double a : prof.a) {
        const CDPair q = extract_CD(prof, ell, s, a);
        CHECK(std::abs(q.D - cplx(2.0, 1.0)) < 1e-9);
        CHECK(std::abs(q.C + 0.5) < 1e-9);
    }
    CHECK_THROWS_AS(extract_CD(prof, ell, s, -0.7), Error);

    // generic solution from arbitrary data, integrated independently
    ConstantModeProfile ode;
    State y{1.0, 0.0, 0.3, -0.2};
    double at = -2.0;
    for (double a : {-1.5, -1.0, -0.5}) {
        y = integrate_mode_ode(ell, s, y, at, a);
        at = a;
        ode.a.push_back(a);
        ode.F0.emplace_back(y[0], y[1]);
        ode.dF0.push_back(cplx(y[2], y[3]) / (ell * ell + a * a));
    }
    const CDPair r0 = extract_CD(ode, ell, s, -1.5);
    for (double a : {-1.0, -0.5}) {
        const CDPair r = extract_CD(ode, ell, s, a);
        CHECK(std::abs(r.D - r0.D) < 1e-8);
        CHECK(std::abs(r.C - r0.C) < 1e-8);
    }
    CHECK_THROWS_AS(extract_CD(1.0, 0.0, ell, 0.5, -1.0), Error);
}

TEST_CASE("sigma and lambda") {
    const cplx s(0.3, 0.0);
    const double sec = 1.0 / std::cos(pi * 0.3);
    const CMatrix cyl = sigma_matrix({1, 0}, s);
    CHECK(std::abs(cyl(0, 0) - sec) < 1e-15);
    CHECK(std::abs(cyl(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(cyl.determinant() - (sec - 1.0) * (sec + 1.0)) < 1e-14);
    const CMatrix ph = sigma_matrix({0, 1}, s);
    CHECK(std::abs(ph(0, 1)) == 0.0);
    CHECK(std::abs(ph(1, 1) - sec) < 1e-15);
    const CMatrix lam = lambda_power({0.0, 0.5}, {1.2, 0.3});
    CHECK(lam(0, 0) == cplx(0.0));
    CHECK(std::abs(lam(1, 1) - std::pow(0.5, cplx(1.4, 0.6))) < 1e-15);
    CHECK_THROWS_AS(sigma_matrix({1, 1}, s), Error);
    CHECK_THROWS_AS(sigma_matrix({1, 0}, 1.5), Error);
    CHECK_THROWS_AS(lambda_power({-1.0}, s), Error);
}

TEST_CASE("D from C") {
    const cplx s(1.3, 0.2);
    const std::vector<int> iota{1, 0, 2};
    const std::vector<double> ell{0.4, 0.4, 0.9};
    CHECK((d_from_c(CMatrix::Zero(3, 3), iota, ell, s) - CMatrix::Identity(3, 3)).norm() == 0.0);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix C(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) C(i, j) = C(j, i) = cplx(u(rng), u(rng));
    CHECK((d_from_c(C, iota, {0.0, 0.0, 0.0}, s) - CMatrix::Identity(3, 3)).norm() == 0.0);

    // scalar phantom end
    const CMatrix c1 = CMatrix::Constant(1, 1, cplx(0.3, -0.1));
    const cplx expect = 1.0 + (2.0 * s - 1.0) * std::pow(4.0, -s) * gamma(s) * gamma(s) / (gamma(0.5 + s) * gamma(0.5 + s)) *
                                  c1(0, 0) / std::cos(pi * s) * std::pow(0.7, 2.0 * s - 1.0);
    CHECK(std::abs(d_from_c(c1, {0}, {0.7}, s)(0, 0) - expect) < 1e-13);

    // D - D^t as a commutator for symmetric C
    const CMatrix D = d_from_c(C, iota, ell, s);
    const CMatrix sl = sigma_matrix(iota, s) * lambda_power(ell, s);
    CHECK((D - D.transpose() - d_factor(s) * (C * sl - sl * C)).norm() < 1e-10);
    CHECK_THROWS_AS(d_from_c(C, iota, ell, 2.5), Error);
    CHECK_THROWS_AS(d_from_c(C, {0, 1}, {1.0, 1.0}, s), Error);
}

TEST_CASE("cylinder Eisenstein function") {
    const cplx s(1.3, 0.2);
    const CylinderEisenstein e(1.0, s);
    // no reflection on the standalone cylinder: E equals h on a < 0 and vanishes on a > 0
    for (double a : {-3.0, -0.5, -0.45, -0.35, -0.2, -0.05}) CHECK(rel(e(a).value, mode_function(1.0, s, 0, a)) < 1e-11);
    for (double a : {0.05, 0.4, 2.0}) CHECK(std::abs(e(a).value) < 1e-11);
    CHECK(std::abs(e.k_minus()) < 1e-11);
    CHECK(std::abs(e.k_plus() + 1.0) < 1e-11);
    CHECK_THROWS_AS(e(0.0), Error);
    CHECK_THROWS_AS(CylinderEisenstein(1.0, 0.4), Error);
    CHECK_THROWS_AS(CylinderEisenstein(0.0, 1.3), Error);
    CylinderOptions wide;
    wide.eps = 0.6;
    CHECK_THROWS_AS(CylinderEisenstein(1.0, s, wide), Error);
}

TEST_CASE("cylinder scattering") {
    const cplx s(1.3, 0.2);
    const ScatteringPair p = cylinder_scattering(1.0, s);
    CHECK(p.C.rows() == 2);
    CHECK((p.D - d_from_c(p.C, p.iota, p.ell, s)).norm() < 1e-6);
    CHECK(std::abs(p.C(0, 1) - p.C(1, 0)) < 1e-8);
    CHECK(std::abs(p.C(0, 0) - p.C(1, 1)) < 1e-8);
    CHECK((p.C * p.D.transpose() - p.D * p.C.transpose()).norm() < 1e-6);

    CylinderOptions narrow;
    narrow.eps = 0.2;
    const ScatteringPair q = cylinder_scattering(1.0, s, narrow);
    CHECK((p.C - q.C).norm() < 1e-7);
    CHECK((p.D - q.D).norm() < 1e-7);

    // C vanishes identically, so there is no decreasing pinching trend to observe
    for (double ell : {0.5, 0.2, 0.1}) {
        const ScatteringPair r = cylinder_scattering(ell, s);
        CHECK(r.C.norm() < 1e-9);
        CHECK((r.D - CMatrix::Identity(2, 2)).norm() < 1e-9);
    }
    // s - 1/2 in N: h(l, 1-s) has a pole and (C, D) is undefined
    try {
        cylinder_scattering(1.0, 1.5);
        FAIL("expected a pole error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::PoleProximity);
    }
}

TEST_CASE("Maass-Selberg relation") {
    const cplx s(1.3, 0.2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const MaassSelbergCheck m = maass_selberg_residual(1.0, s, 2.0, 0.2, i, j);
            CHECK(m.residual < 1e-6);
        }
    const MaassSelbergCheck diag = maass_selberg_residual(1.0, s, 2.0, 0.2, 0, 0);
    CHECK(std::abs(diag.lhs) > 1.0);

    // s' = s: the right-hand side reduces to (1-2s)(D C^t - C D^t)
    const ScatteringPair p = cylinder_scattering(1.0, s);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const cplx rhs = maass_selberg_rhs(p.C, p.D, p.C, p.D, p.ell, s, s, 0.2, i, j);
            const cplx comb = (1.0 - 2.0 * s) * (p.D * p.C.transpose() - p.C * p.D.transpose())(i, j);
            CHECK(std::abs(rhs - comb) < 1e-8);
        }
    const CMatrix zero = CMatrix::Zero(2, 2);
    CHECK(maass_selberg_rhs(zero, zero, zero, zero, p.ell, s, 2.0, 0.2, 0, 1) == cplx(0.0));
    CHECK_THROWS_AS(maass_selberg_residual(1.0, s, 2.0, 0.5, 0, 0), Error);
    CHECK_THROWS_AS(maass_selberg_residual(1.0, 1.5, 2.0, 0.2, 0, 0), Error);
}

TEST_CASE("C prime and identity report") {
    const CMatrix C = (CMatrix(2, 2) << cplx(0.1, 0.2), 0.3, 0.3, cplx(-0.4, 0.1)).finished();
    CHECK(cprime(CMatrix::Zero(2, 2), 2.0 * CMatrix::Identity(2, 2)).norm() == 0.0);
    CHECK((cprime(C, CMatrix::Identity(2, 2)) - C).norm() < 1e-15);
    CHECK_THROWS_AS(cprime(C, CMatrix::Zero(2, 2)), Error);

    const cplx s(1.3, 0.2);
    ScatteringPair p;
    p.iota = {1, 0};
    p.ell = {0.5, 0.5};
    p.s = s;
    p.C = C;
    p.D = d_from_c(C, p.iota, p.ell, s);
    const IdentityReport r = identity_residuals(p);
    CHECK(r.c_symmetry < 1e-15);
    CHECK(r.cprime_symmetry < 1e-12);
    CHECK(r.d_antisymmetric < 1e-12);
    CHECK(!r.unitarity.has_value());
    CHECK(!r.functional_dd_cc.has_value());

    // a unitary symmetric C' on the critical line
    ScatteringPair u;
    u.iota = {1, 0};
    u.ell = {0.5, 0.5};
    u.s = {0.5, 0.3};
    const double c = std::cos(0.4), sn = std::sin(0.4);
    u.C = (CMatrix(2, 2) << c, cplx(0.0, sn), cplx(0.0, sn), c).finished();
    u.D = CMatrix::Identity(2, 2);
    const IdentityReport ru = identity_residuals(u, &u, true);
    REQUIRE(ru.unitarity.has_value());
    CHECK(*ru.unitarity < 1e-14);
    CHECK(ru.functional_dd_cc.has_value());
}

TEST_CASE("left half-plane asymptote") {
    const std::vector<int> iota{1, 0};
    const cplx s(0.2, 0.0);
    const CMatrix a = lhp_c_asymptote({0.1, 0.1}, iota, s);
    const CMatrix b = lhp_c_asymptote({0.2, 0.2}, iota, s);
    CHECK((b - std::pow(2.0, 1.0 - 2.0 * s) * a).norm() < 1e-13 * a.norm());
    CHECK((a - a.transpose()).norm() < 1e-15);
    const CMatrix c = lhp_c_asymptote({0.1, 0.1}, iota, 0.3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(std::isfinite(std::abs(c(i, j))));
            CHECK(std::abs(c(i, j)) > 0.0);
        }
    CHECK_THROWS_AS(lhp_c_asymptote({0.1, 0.1}, iota, 0.7), Error);
}
