#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pinchlab/kernel.hpp"
#include "pinchlab/transform.hpp"
#include "pinchlab/zeta.hpp"

using namespace pinchlab;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Usage;
}

} // namespace

TEST_CASE("piecewise Chebyshev") {
    const RealFunction f = [](double x) { return cplx(std::sin(x), std::exp(-x)); };
    const PiecewiseChebyshev p = PiecewiseChebyshev::fit(f, 0.0, 10.0, 1e-13);
    double err = 0.0, derr = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = 10.0 * i / 200.0;
        err = std::max(err, std::abs(p(x) - f(x)));
        derr = std::max(derr, std::abs(p.derivative(x) - cplx(std::cos(x), -std::exp(-x))));
    }
    CHECK(err < 1e-12);
    CHECK(derr < 1e-10);
    CHECK(p(10.5) == cplx(0.0));
    CHECK_THROWS_AS(p(-0.1), Error);
    CHECK_THROWS_AS(PiecewiseChebyshev::fit(f, 1.0, 1.0, 1e-10), Error);
    CHECK(std::abs(w_to_u(u_to_w(1.7)) - 1.7) < 1e-15);
    CHECK(std::abs(u_to_w(1.0) - (std::exp(1.0) + std::exp(-1.0) - 2.0)) < 1e-15);
}

TEST_CASE("resolvent triple") {
    const SelbergTriple t = resolvent_triple(2.0, 3.0);
    CHECK(std::abs(t.g(0.0) + 1.0 / 5.0 - 1.0 / 3.0) < 1e-15);
    // h_s(xi) = 1/(xi^2 + (s-1/2)^2) is the Fourier transform of g_s
    const RealFunction gs = [](double u) { return cplx(std::exp(-1.5 * std::abs(u)) / 3.0); };
    CHECK(std::abs(even_fourier(gs, 0.7) - 1.0 / (0.49 + 2.25)) < 1e-8);
    CHECK(std::abs(even_fourier(t.g, 0.7) - t.h(0.7)) < 1e-8);
    for (double x : {0.3, 1.0, 4.0}) {
        CHECK(t.h(-x) == t.h(x));
        CHECK(t.g(-x) == t.g(x));
    }
    CHECK(std::abs(t.Q(u_to_w(1.3)) - t.g(1.3)) < 1e-15);
    const double w = 2.0, dw = 1e-5;
    CHECK(std::abs(t.dQ(w) - (t.Q(w + dw) - t.Q(w - dw)) / (2.0 * dw)) < 1e-9);
    CHECK(std::abs(t.dQ(0.0) - 0.25 * (1.5 - 2.5)) < 1e-15);
    CHECK(t.decay.rho == 1.0);

    // decay bounds with rho = 1
    double gmax = 0.0;
    for (double u = 0.0; u <= 20.0; u += 0.25) gmax = std::max(gmax, std::abs(t.g(u)) * std::exp(1.5 * u));
    CHECK(gmax <= 1.0 / 3.0 + 1e-15);
    double kmax = 0.0;
    for (double tt : {0.0, 0.1, 1.0, 10.0, 100.0, 1000.0}) kmax = std::max(kmax, std::abs(t.k(tt)) * (1.0 + tt) * (1.0 + tt));
    CHECK(std::isfinite(kmax));
    CHECK(std::abs(t.k(1000.0)) * 1001.0 * 1001.0 <= std::abs(t.k(100.0)) * 101.0 * 101.0 * 1.5);

    const cplx sc(1.4, 0.6);
    const SelbergTriple c = resolvent_triple(sc, 2.5);
    CHECK(std::abs(c.h(0.9) - (1.0 / (0.81 + (sc - 0.5) * (sc - 0.5)) - 1.0 / (0.81 + 4.0))) < 1e-15);
    CHECK(kind_of([] { resolvent_triple(0.5, 3.0); }) == ErrorKind::PoleProximity);
    CHECK(kind_of([] { resolvent_triple(0.3, 3.0); }) == ErrorKind::Domain);
}

TEST_CASE("Abel and Fourier transforms") {
    const RealFunction k = [](double t) { return cplx(1.0 / ((1.0 + t) * (1.0 + t))); };
    for (double w : {0.0, 0.5, 3.0, 1e3}) CHECK(std::abs(abel_transform(k, w) - 0.5 * pi * std::pow(1.0 + w, -1.5)) < 1e-12);
    const RealFunction g = [](double u) { return cplx(0.5 * pi * std::pow(2.0 * std::cosh(u) - 1.0, -1.5)); };
    // mpmath
    CHECK(std::abs(even_fourier(g, 0.0) - 2.8145617205475089534) < 1e-10);
    CHECK(std::abs(even_fourier(g, 1.0) - 1.961415520143265086) < 1e-10);
    CHECK(std::abs(even_fourier(g, 3.0) - 0.38859368077862026199) < 1e-10);
    const RealFunction h = [](double xi) { return cplx(1.0 / (xi * xi + 2.25)); };
    CHECK(std::abs(even_inverse_fourier(h, 0.8) - std::exp(-1.2) / 3.0) < 1e-10);
    // k back from g'
    const RealFunction dg = [](double u) {
        const double e = std::exp(-u);
        return cplx(-0.75 * pi * std::exp(-1.5 * u) * (1.0 - e * e) / std::pow(1.0 - e + e * e, 2.5));
    };
    for (double t : {0.0, 0.5, 4.0, 20.0}) CHECK(std::abs(inverse_abel_transform(dg, t) - k(t)) < 1e-10);
    CHECK_THROWS_AS(abel_transform(k, -1.0), Error);
    CHECK_THROWS_AS(w_to_u(-1.0), Error);
}

TEST_CASE("transform chain round trip") {
    const RealFunction k = [](double t) { return cplx(1.0 / ((1.0 + t) * (1.0 + t))); };
    const SelbergTriple a = transform_chain(k, ChainDirection::KtoH);
    CHECK(std::abs(a.Q(1e3)) < 1e-4);
    CHECK(std::abs(a.Q(1e3) - 0.5 * pi * std::pow(1001.0, -1.5)) < 1e-12);
    CHECK(std::abs(a.h(1.0) - 1.961415520143265086) < 1e-9);
    CHECK(std::abs(a.h(-3.0) - 0.38859368077862026199) < 1e-9);
    CHECK(std::abs(a.dQ(2.0) - (-0.75 * pi * std::pow(3.0, -2.5))) < 1e-8);

    TransformSpec back;
    back.input_support = a.h_support;
    const SelbergTriple b = transform_chain(a.h, ChainDirection::HtoK, back);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double t = 20.0 * i / 200.0;
        worst = std::max(worst, std::abs(b.k(t) - k(t)));
    }
    CHECK(worst < 1e-6);
    CHECK(worst < 1e-9);
    for (double u : {0.0, 0.7, 3.0}) CHECK(std::abs(b.g(u) - a.g(u)) < 1e-10);
}

TEST_CASE("transform chain reproduces the resolvent kernel") {
    const SelbergTriple t = resolvent_triple(2.0, 3.0);
    TransformSpec spec;
    spec.decay = t.decay;
    const SelbergTriple c = transform_chain(t.h, ChainDirection::HtoK, spec);
    for (double x : {0.5, 2.0, 10.0}) {
        const cplx ref = point_pair_k(2.0, x) - point_pair_k(3.0, x);
        CHECK(std::abs(c.k(x) - ref) < 1e-6);
        CHECK(std::abs(c.k(x) - ref) < 1e-9 * std::abs(ref));
    }
    CHECK(std::abs(c.k(0.0) - identity_term(2.0, 3.0)) < 1e-9);
    for (double u : {0.0, 1.0, 5.0}) CHECK(std::abs(c.g(u) - t.g(u)) < 1e-11);
}

TEST_CASE("transform chain decay hypotheses") {
    const RealFunction slow_k = [](double t) { return cplx(1.0 / std::sqrt(1.0 + t)); };
    CHECK(kind_of([&] { transform_chain(slow_k, ChainDirection::KtoH); }) == ErrorKind::DecayHypothesis);
    const RealFunction slow_h = [](double xi) { return cplx(1.0 / (1.0 + std::abs(xi))); };
    CHECK(kind_of([&] { transform_chain(slow_h, ChainDirection::HtoK); }) == ErrorKind::DecayHypothesis);
    TransformSpec bad;
    bad.tolerance = 0.0;
    CHECK(kind_of([&] { transform_chain(slow_k, ChainDirection::KtoH, bad); }) == ErrorKind::Domain);
}

TEST_CASE("identity term") {
    CHECK(identity_term(2.0, 2.0) == cplx(0.0));
    CHECK(std::abs(identity_term(2.0, 3.0) + identity_term(3.0, 2.0)) < 1e-15);
    const cplx it = identity_term(2.0, 3.0);
    // -(psi(2) - psi(3)) / (2 pi) = 1/(4 pi)
    CHECK(std::abs(it - 1.0 / (4.0 * pi)) < 1e-12);
    CHECK(std::abs(it - kernel_difference_at_zero(2.0, 3.0)) < 1e-8);
    CHECK(std::abs(it - identity_term_series(2.0, 3.0)) < 1e-10);
    const cplx s(1.5, 0.5);
    const cplx ic = identity_term(s, 3.0);
    CHECK(std::abs(ic + (digamma(s) - digamma(cplx(3.0))) / (2.0 * pi)) < 1e-12);
    CHECK(std::abs(ic - kernel_difference_at_zero(s, 3.0)) < 1e-8);
    CHECK(std::abs(ic - identity_term_series(s, 3.0)) < 1e-10);
    CHECK(kind_of([] { identity_term(0.5, 2.0); }) == ErrorKind::PoleProximity);
}

TEST_CASE("geometric side") {
    const RealFunction zero = [](double) { return cplx(0.0); };
    CHECK(geometric_side(std::vector<double>{1.0, 2.0}, zero).value == cplx(0.0));

    const SelbergTriple t = resolvent_triple(2.0, 3.0);
    GeometricSideOptions opts;
    opts.decay_rate = 1.5;
    opts.decay_constant = 1.0 / 3.0 + 1.0 / 5.0;
    const GeometricSideResult g = geometric_side(std::vector<double>{1.0}, t.g, opts);
    const cplx zeta_side = log_deriv_factor(1.0, 2.0).value / 3.0 - log_deriv_factor(1.0, 3.0).value / 5.0;
    CHECK(std::abs(g.value - zeta_side) < 1e-8);
    // mpmath
    CHECK(std::abs(g.value - 0.12614913834602370043) < 1e-13);

    // positive terms: the truncated sum lies below the converged one, within its tail bound
    const RealFunction gs = [](double u) { return cplx(std::exp(-1.5 * std::abs(u)) / 3.0); };
    GeometricSideOptions loose = opts;
    loose.decay_constant = 1.0 / 3.0;
    loose.tolerance = 1e-3;
    GeometricSideOptions tight = loose;
    tight.tolerance = 1e-14;
    const GeometricSideResult lo = geometric_side(std::vector<double>{1.0}, gs, loose);
    const GeometricSideResult hi = geometric_side(std::vector<double>{1.0}, gs, tight);
    CHECK(lo.terms < hi.terms);
    CHECK(lo.value.real() <= hi.value.real());
    CHECK(hi.value.real() <= lo.value.real() + lo.tail_bound);

    LengthSpectrum spec;
    spec.entries.push_back({1.0, 2, true, "a"});
    spec.entries.push_back({2.0, 1, false, "aa"});
    CHECK(std::abs(geometric_side(spec, t.g, opts).value - 2.0 * g.value) < 1e-15);

    GeometricSideOptions none;
    none.decay_rate = 0.0;
    CHECK(kind_of([&] { geometric_side(std::vector<double>{1.0}, gs, none); }) == ErrorKind::DecayHypothesis);
    CHECK(kind_of([&] { geometric_side(std::vector<double>{-1.0}, gs, opts); }) == ErrorKind::Domain);
}

TEST_CASE("cylinder trace check") {
    TraceConfig cfg;
    const TraceCheck c = cylinder_trace_check(1.0, cfg);
    CHECK(c.residual < 1e-6);
    // mpmath: direct orbit-sum quadrature and the closed-form geometric sum agree
    CHECK(std::abs(c.lhs - 0.12614913834602370043) < 1e-9);
    CHECK(std::abs(c.rhs - 0.12614913834602370043) < 1e-13);
    CHECK(std::abs(c.lhs - (c.near_part + c.far_part)) < 1e-15);

    TraceConfig other = cfg;
    other.A = 2.5;
    CHECK(std::abs(cylinder_trace_check(1.0, other).lhs - c.lhs) < 1e-10);

    TraceConfig z;
    z.s = {2.0, 0.5};
    TraceConfig zc = z;
    zc.s = std::conj(z.s);
    const TraceCheck p = cylinder_trace_check(1.0, z);
    const TraceCheck q = cylinder_trace_check(1.0, zc);
    CHECK(p.residual < 1e-6);
    CHECK(std::abs(q.lhs - std::conj(p.lhs)) < 1e-12);
    CHECK(std::abs(q.rhs - std::conj(p.rhs)) < 1e-14);

    TraceConfig bad = cfg;
    bad.s = 0.9;
    CHECK(kind_of([&] { cylinder_trace_check(1.0, bad); }) == ErrorKind::Domain);
    CHECK(kind_of([&] { cylinder_trace_check(0.0, cfg); }) == ErrorKind::Domain);
}
