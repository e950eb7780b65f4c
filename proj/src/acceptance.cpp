#include "pinchlab/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "pinchlab/error.hpp"
#include "pinchlab/hyperbolic.hpp"
#include "pinchlab/kernel.hpp"
#include "pinchlab/scattering.hpp"
#include "pinchlab/surface.hpp"
#include "pinchlab/transform.hpp"
#include "pinchlab/zeta.hpp"

namespace pinchlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string g3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string percent(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
    return buf;
}

std::string cstr(cplx z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g%+gi", z.real(), z.imag());
    return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

CriterionResult result(bool pass, std::string detail) {
    CriterionResult r;
    r.pass = pass;
    r.detail = std::move(detail);
    return r;
}

// ---------------------------------------------------------------------------

CriterionResult pinching_asymptotic() {
    const auto t0 = Clock::now();
    const double target = 2.0 * pi;
    bool pass = true;
    std::string detail;
    for (double s : {0.75, 1.0, 2.0}) {
        std::vector<double> err;
        for (double ell : {0.1, 0.05, 0.02}) err.push_back(std::abs(pinch_asymptotic(ell, s) - target) / target);
        const bool ok = err[1] <= 0.05 && err[2] <= 0.02 && strictly_decreasing(err);
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += "s=" + g3(s) + ": " + percent(err[0]) + ", " + percent(err[1]) + ", " + percent(err[2]) +
                  (ok ? "" : " (fails)");
    }
    const double t = seconds_since(t0);
    if (t >= 1.0) {
        pass = false;
        detail += "; runtime " + g3(t) + " s exceeds 1 s";
    }
    return result(pass, "relative error at l = 0.1, 0.05, 0.02 (limits 5% at 0.05, 2% at 0.02): " + detail);
}

CriterionResult wronskian_identity(const Tolerances& tol) {
    double worst = 0.0;
    for (double ell : {0.1, 0.5, 1.0, 2.0})
        for (double a : {-2.0, -1.0, -0.3})
            for (cplx s : {cplx(0.7, 0.0), cplx(1.3, 0.8), cplx(2.0, 0.0)}) {
                const cplx w = (ell * ell + a * a) * wronskian(ell, s, 1.0 - s, a);
                worst = std::max(worst, std::abs(w - (1.0 - 2.0 * s)));
            }
    return result(worst < tol.identity, "max |(l^2+a^2) w - (1-2s)| = " + g3(worst) + " over 36 points");
}

using OdeState = std::array<double, 4>;

// (p u')' = -s(1-s) u with p = l^2 + a^2, state (u, p u')
cplx integrate_constant_mode(double ell, cplx s, double from, double to) {
    namespace odeint = boost::numeric::odeint;
    const ModeValue m = mode(ell, s, 0, from);
    const cplx pv = (ell * ell + from * from) * m.derivative;
    OdeState y{m.value.real(), m.value.imag(), pv.real(), pv.imag()};
    const cplx lam = s * (1.0 - s);
    auto rhs = [&](const OdeState& x, OdeState& dx, double a) {
        const double p = ell * ell + a * a;
        const cplx du = cplx(x[2], x[3]) / p;
        const cplx dv = -lam * cplx(x[0], x[1]);
        dx = {du.real(), du.imag(), dv.real(), dv.imag()};
    };
    auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<OdeState>());
    odeint::integrate_adaptive(stepper, rhs, y, from, to, (to - from) * 1e-3);
    return {y[0], y[1]};
}

CriterionResult connection_formulas(const Tolerances& tol) {
    struct Sample {
        double ell;
        cplx s;
        double a;
    };
    const std::vector<Sample> samples = {
        {1.0, {0.7, 0.0}, -0.5},  {0.5, {1.3, 0.8}, -0.2}, {2.0, {2.0, 0.0}, -1.0}, {0.3, {0.9, -0.4}, -0.05},
        {1.0, {1.2, 0.0}, -2.5},  {1.0, {0.7, 0.0}, 0.5},  {0.5, {1.3, 0.8}, 0.3},  {2.0, {2.0, 0.0}, 1.5},
        {0.3, {0.9, -0.4}, 0.1},  {1.5, {1.7, 0.3}, 0.8},
    };
    double center = 0.0, right = 0.0, ode = 0.0;
    for (const auto& p : samples) {
        if (p.a < 0.0) {
            const cplx ref = mode_function(p.ell, p.s, 0, p.a);
            center = std::max(center, std::abs(eigen_center(p.ell, p.s, p.a) - ref) / std::max(1.0, std::abs(ref)));
        } else {
            const cplx ref = eigen_right(p.ell, p.s, p.a);
            const double scale = std::max(1.0, std::abs(ref));
            center = std::max(center, std::abs(eigen_center(p.ell, p.s, p.a) - ref) / scale);
            right = std::max(right, std::abs(mode_continued(p.ell, p.s, p.a).value - ref) / scale);
            ode = std::max(ode, std::abs(integrate_constant_mode(p.ell, p.s, -1.0, p.a) - ref) / scale);
        }
    }
    const double worst = std::max({center, right, ode});
    return result(worst < tol.connection, "10 samples: eigen-center " + g3(center) + ", eigen-right " + g3(right) +
                                              ", ODE continuation " + g3(ode));
}

CriterionResult cylinder_trace(const Tolerances& tol) {
    const TraceConfig cfg;
    const TraceCheck tc = cylinder_trace_check(1.0, cfg);
    const cplx closed = log_deriv_factor(1.0, cfg.s).value / (2.0 * cfg.s - 1.0) -
                        log_deriv_factor(1.0, cfg.s0).value / (2.0 * cfg.s0 - 1.0);
    const double geo = std::abs(tc.rhs - closed);
    const bool pass = tc.residual < tol.quadrature && geo < tol.identity;
    return result(pass, "(l,s,s0)=(1,2,3): |lhs-rhs| = " + g3(tc.residual) + ", geometric side vs Zeta log-derivative " +
                            g3(geo));
}

CriterionResult identity_term_check(const Tolerances& tol) {
    const cplx it = identity_term(2.0, 3.0);
    const cplx kd = kernel_difference_at_zero(2.0, 3.0);
    const double d = std::abs(it - kd);
    return result(d < tol.identity, "identity_term(2,3) = " + cstr(it) + ", k_2(0)-k_3(0) = " + cstr(kd) +
                                        ", difference " + g3(d));
}

CriterionResult kernel_closed_form() {
    double closed = 0.0;
    for (double t : {0.5, 1.0, 5.0})
        closed = std::max(closed, std::abs(point_pair_k(1.0, t) - std::log(1.0 + 4.0 / t) / (4.0 * pi)));
    double methods = 0.0;
    for (cplx s : {cplx(0.75, 0.0), cplx(1.3, 0.8), cplx(2.0, 0.0)})
        for (double t : {0.5, 1.0, 5.0}) {
            const cplx a = point_pair_k(s, t, KernelMethod::Series);
            const cplx b = point_pair_k(s, t, KernelMethod::Quadrature);
            methods = std::max(methods, std::abs(a - b));
        }
    return result(closed < 1e-10 && methods < 1e-8,
                  "closed form at s=1: " + g3(closed) + "; series vs quadrature on 3x3 grid: " + g3(methods));
}

CriterionResult transform_round_trip(const Tolerances& tol) {
    const auto t0 = Clock::now();
    const RealFunction k = [](double t) { return cplx(1.0 / ((1.0 + t) * (1.0 + t))); };
    const SelbergTriple forward = transform_chain(k, ChainDirection::KtoH);
    TransformSpec back;
    back.input_support = forward.h_support;
    const SelbergTriple round = transform_chain(forward.h, ChainDirection::HtoK, back);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double t = 20.0 * i / 400.0;
        worst = std::max(worst, std::abs(round.k(t) - k(t)));
    }
    const double secs = seconds_since(t0);
    return result(worst < tol.quadrature && secs < 10.0,
                  "k(t)=(1+t)^-2, sup over [0,20] = " + g3(worst) + " in " + g3(secs) + " s (limit 10 s)");
}

CriterionResult pants_construction(const Tolerances& tol) {
    const PantsGroup p = build_pants(1.0, 2.0, 3.0);
    double lengths = 0.0;
    for (int i = 0; i < 3; ++i) lengths = std::max(lengths, std::abs(translation_length(p.gamma[i]) - (i + 1.0)));
    const double relation = identity_residual(p.gamma[2] * p.gamma[1] * p.gamma[0]);

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    double recursion = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Hexagon h = hexagon(dist(rng), dist(rng), dist(rng));
        for (int i = 0; i < 3; ++i) {
            const auto& Ti = h.T[i];
            const auto& Tn = h.T[(i + 1) % 3];
            const double tl = inversive_product(Tn, h.L[(i + 1) % 3]);
            const double rec = 2.0 * (inversive_product(Ti, Tn) + tl) / (1.0 + tl) - 1.0;
            recursion = std::max(recursion, std::abs(inversive_product(Ti, h.L[i]) - rec));
        }
    }
    const bool pass = lengths < tol.geometry && relation < tol.geometry && recursion < 1e-10;
    return result(pass, "translation lengths " + g3(lengths) + ", |g3 g2 g1 -+ I| " + g3(relation) +
                            ", hexagon recursion on 20 random triples " + g3(recursion));
}

CriterionResult length_spectrum_stability() {
    const AssembledSurface s = pants_surface(1.0, 2.0, 3.0);
    const SpectrumBudget budget;
    const LengthSpectrum a = length_spectrum(s, 6.0, 1e-8, budget);
    const LengthSpectrum b = length_spectrum(s, 6.0, 1e-8, budget.doubled());
    bool stable = a.entries.size() == b.entries.size();
    for (std::size_t i = 0; stable && i < a.entries.size(); ++i)
        stable = std::abs(a.entries[i].length - b.entries[i].length) <= 1e-10 &&
                 a.entries[i].multiplicity == b.entries[i].multiplicity;
    const auto n4 = a.count_primitive(4.0);
    const auto n6 = a.count_primitive(6.0);
    const double C = static_cast<double>(n4) / std::exp(4.0);
    const bool growth = static_cast<double>(n6) <= C * std::exp(6.0);
    return result(stable && growth, std::to_string(a.entries.size()) + " entries to r=6, " +
                                        std::to_string(b.entries.size()) + " with doubled budget; N(4)=" +
                                        std::to_string(n4) + ", N(6)=" + std::to_string(n6) + " <= C e^6 = " +
                                        g3(C * std::exp(6.0)));
}

struct ScatteringSuite {
    double dcalc = 0.0;
    double symmetry = 0.0;
    double chi = 0.0;
    double ms = 0.0;
    std::vector<double> norms;
};

ScatteringSuite scattering_suite(cplx s) {
    ScatteringSuite r;
    const ScatteringPair p = cylinder_scattering(1.0, s);
    r.dcalc = (p.D - d_from_c(p.C, p.iota, p.ell, s)).norm();
    r.symmetry = (p.C - p.C.transpose()).norm();
    CylinderOptions narrow;
    narrow.eps = 0.2;
    const ScatteringPair q = cylinder_scattering(1.0, s, narrow);
    r.chi = std::max((p.C - q.C).norm(), (p.D - q.D).norm());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.ms = std::max(r.ms, maass_selberg_residual(1.0, s, 2.0, 0.2, i, j).residual);
    for (double ell : {0.5, 0.2, 0.1}) r.norms.push_back(cylinder_scattering(ell, s).C.norm());
    return r;
}

std::string describe(const ScatteringSuite& r) {
    return "D-calc " + g3(r.dcalc) + ", C symmetry " + g3(r.symmetry) + ", chi-independence " + g3(r.chi) +
           ", Maass-Selberg " + g3(r.ms) + ", |C| at l=0.5,0.2,0.1: " + g3(r.norms[0]) + ", " + g3(r.norms[1]) +
           ", " + g3(r.norms[2]);
}

CriterionResult cylinder_scattering_suite(const Tolerances& tol) {
    bool pass = false;
    std::string detail;
    try {
        const ScatteringSuite r = scattering_suite(1.5);
        pass = r.dcalc < tol.quadrature && r.symmetry < tol.identity && r.chi < tol.connection &&
               r.ms < tol.quadrature && strictly_decreasing(r.norms);
        detail = "s=1.5: " + describe(r);
    } catch (const Error& e) {
        detail = "s=1.5: " + std::string(to_string(e.kind())) + ": " + e.what();
    }
    // off the excluded set the same suite is computable
    const cplx probe(1.3, 0.2);
    try {
        detail += " | diagnostic at s=" + cstr(probe) + ": " + describe(scattering_suite(probe));
    } catch (const Error& e) {
        detail += " | diagnostic at s=" + cstr(probe) + " failed: " + e.what();
    }
    return result(pass, detail);
}

CriterionResult lhp_reduction() {
    bool pass = true;
    std::string detail;
    for (cplx s : {cplx(2.0, 0.0), cplx(0.3, 0.5)}) {
        std::vector<double> err;
        for (double ell : {0.1, 0.05, 0.02}) err.push_back(std::abs(lhp_reduction_ratio(ell, s) - 1.0));
        const bool ok = strictly_decreasing(err);
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += "s=" + cstr(s) + ": " + g3(err[0]) + ", " + g3(err[1]) + ", " + g3(err[2]) + (ok ? "" : " (fails)");
    }
    return result(pass, "|ratio-1| at l = 0.1, 0.05, 0.02: " + detail);
}

CriterionResult zeta_quotient_stability() {
    AugmentedGraph g;
    g.vertices = {"v"};
    g.edges = {{"d0", "v", 0, std::string("d1")}, {"d1", "v", 1, std::string("d0")}, {"p", "v", 2, std::nullopt}};
    auto quotient = [&](double ell) {
        FNLabel label;
        label.labels = {{"d0", {ell, 0.0}}, {"p", {0.0, 0.0}}};
        const LengthSpectrum sp = length_spectrum(assemble(g, label), 8.0);
        return zeta_truncated(sp, 2.0) / zeta_factor(ell, 2.0);
    };
    const cplx q2 = quotient(0.2);
    const cplx q1 = quotient(0.1);
    const double change = std::abs(q2 - q1) / std::abs(q1);
    return result(change < 0.01, "once-punctured torus, s=2, r_max=8: quotient " + cstr(q2) + " at l=0.2, " +
                                     cstr(q1) + " at l=0.1, relative change " + g3(change) + " (limit 0.01)");
}

} // namespace

std::vector<Criterion> acceptance_criteria(const Tolerances& tol) {
    return {
        {1, "pinching asymptotic", pinching_asymptotic},
        {2, "Wronskian identity", [tol] { return wronskian_identity(tol); }},
        {3, "connection formulas", [tol] { return connection_formulas(tol); }},
        {4, "cylinder trace formula", [tol] { return cylinder_trace(tol); }},
        {5, "identity term", [tol] { return identity_term_check(tol); }},
        {6, "point-pair kernel closed form", kernel_closed_form},
        {7, "Selberg transform round trip", [tol] { return transform_round_trip(tol); }},
        {8, "pants construction", [tol] { return pants_construction(tol); }},
        {9, "length spectrum stability", length_spectrum_stability},
        {10, "cylinder scattering identities", [tol] { return cylinder_scattering_suite(tol); }},
        {11, "left half-plane reduction", lhp_reduction},
        {12, "Zeta quotient degeneration stability", zeta_quotient_stability},
    };
}

CriterionResult run_criterion(const Criterion& c) {
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
        r = c.run();
    } catch (const Error& e) {
        r = result(false, std::string(to_string(e.kind())) + ": " + e.what());
    } catch (const std::exception& e) {
        r = result(false, e.what());
    }
    r.id = c.id;
    r.name = c.name;
    r.seconds = seconds_since(t0);
    return r;
}

std::string format_result(const CriterionResult& r) {
    char head[16];
    std::snprintf(head, sizeof head, "%s %2d ", r.pass ? "PASS" : "FAIL", r.id);
    char secs[32];
    std::snprintf(secs, sizeof secs, " (%.2f s)", r.seconds);
    return head + r.name + ": " + r.detail + secs;
}

int run_acceptance(std::ostream& out, const Tolerances& tol) {
    int passed = 0;
    const auto criteria = acceptance_criteria(tol);
    for (const auto& c : criteria) {
        const CriterionResult r = run_criterion(c);
        passed += r.pass ? 1 : 0;
        out << format_result(r) << '\n' << std::flush;
    }
    out << passed << "/" << criteria.size() << " criteria pass\n";
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}

} // namespace pinchlab
