#include "pinchlab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pinchlab/error.hpp"
#include "pinchlab/kernel.hpp"
#include "pinchlab/parallel.hpp"

namespace pinchlab {

namespace {

QuadratureSpec quad_spec(double tol, double abs_tol = 0.0) {
    QuadratureSpec spec;
    spec.relative_tolerance = tol;
    spec.absolute_tolerance = std::max(abs_tol, 1e-300);
    spec.max_subdivisions = 20000;
    return spec;
}

// integrate f over [lo, hi] in pieces of at most `piece` to keep oscillatory integrands well resolved
cplx integrate_pieces(const Integrand& f, double lo, double hi, double piece, double tol, double abs_tol) {
    QuadratureSpec spec = quad_spec(tol);
    spec.absolute_tolerance = std::max(abs_tol, 1e-300);
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / piece)));
    cplx total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = lo + (hi - lo) * i / n;
        const double b = (i + 1 == n) ? hi : lo + (hi - lo) * (i + 1) / n;
        total += integrate(f, a, b, spec).value;
    }
    return total;
}

void guard_resolvent(cplx s, const char* where) {
    if (std::abs(s - 0.5) < 1e-6)
        throw Error(ErrorKind::PoleProximity, std::string(where) + ": s within 1e-6 of the pole at 1/2");
    if (!(s.real() > 0.5)) throw Error(ErrorKind::Domain, std::string(where) + ": requires Re s > 1/2");
}

double max_abs(const RealFunction& f, double lo, double hi, int samples) {
    double m = 0.0;
    for (int i = 0; i <= samples; ++i) m = std::max(m, std::abs(f(lo + (hi - lo) * i / samples)));
    return m;
}

// smallest X on a doubling grid beyond which |f| stays below level (two consecutive samples)
double support_end(const RealFunction& f, double start, double level, double limit) {
    double x = start;
    int quiet = 0;
    double first_quiet = x;
    while (x < limit) {
        if (std::abs(f(x)) < level) {
            if (quiet == 0) first_quiet = x;
            if (++quiet == 3) return first_quiet;
        } else {
            quiet = 0;
        }
        x *= 1.25;
    }
    throw Error(ErrorKind::DecayHypothesis, "transform_chain: function does not decay below the cut-off before " +
                                               std::to_string(limit));
}

void check_decay(const RealFunction& f, const std::function<double(double)>& weight, const std::vector<double>& near,
                 const std::vector<double>& far, const char* what) {
    double ref = 0.0;
    for (double x : near) ref = std::max(ref, std::abs(f(x)) * weight(x));
    for (double x : far) {
        const double v = std::abs(f(x)) * weight(x);
        if (!std::isfinite(v) || v > 10.0 * ref + 1e-300) {
            std::ostringstream msg;
            msg << "transform_chain: " << what << " violates the declared decay at " << x << " (weighted value " << v
                << " vs " << ref << ")";
            throw Error(ErrorKind::DecayHypothesis, msg.str());
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------
// piecewise Chebyshev

PiecewiseChebyshev PiecewiseChebyshev::fit(const RealFunction& f, double lower, double upper, double abs_tol, int degree,
                                           int max_panels) {
    if (!(upper > lower)) throw Error(ErrorKind::InvalidInterval, "PiecewiseChebyshev: empty interval");
    if (degree < 4) throw Error(ErrorKind::Domain, "PiecewiseChebyshev: degree must be at least 4");
    const int p = degree;
    std::vector<double> nodes(p + 1);
    for (int j = 0; j <= p; ++j) nodes[j] = std::cos(pi * j / p);

    auto make_panel = [&](double a, double b) {
        std::vector<cplx> vals(p + 1);
        for (int j = 0; j <= p; ++j) vals[j] = f(0.5 * (a + b) + 0.5 * (b - a) * nodes[j]);
        Panel panel;
        panel.a = a;
        panel.b = b;
        panel.c.assign(p + 1, 0.0);
        for (int k = 0; k <= p; ++k) {
            cplx sum = 0.0;
            for (int j = 0; j <= p; ++j) {
                const double w = (j == 0 || j == p) ? 0.5 : 1.0;
                sum += w * vals[j] * std::cos(pi * static_cast<double>(j * k % (2 * p)) / p);
            }
            panel.c[k] = sum * ((k == 0 || k == p) ? 1.0 : 2.0) / static_cast<double>(p);
        }
        return panel;
    };
    auto converged = [&](const Panel& panel) {
        const double tail = std::max({std::abs(panel.c[p]), std::abs(panel.c[p - 1]), std::abs(panel.c[p - 2])});
        return tail <= abs_tol;
    };

    PiecewiseChebyshev out;
    out.lower_ = lower;
    out.upper_ = upper;
    std::vector<std::pair<double, double>> stack{{lower, upper}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        Panel panel = make_panel(a, b);
        if (converged(panel) || (b - a) < 1e-9 * std::max(1.0, std::abs(upper - lower))) {
            out.panels_.push_back(std::move(panel));
        } else {
            if (static_cast<int>(out.panels_.size() + stack.size()) >= max_panels)
                throw Error(ErrorKind::Budget, "PiecewiseChebyshev: panel budget exhausted");
            const double m = 0.5 * (a + b);
            stack.emplace_back(m, b);
            stack.emplace_back(a, m);
        }
    }
    std::sort(out.panels_.begin(), out.panels_.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (Panel& panel : out.panels_) {
        panel.dc.assign(p + 1, 0.0);
        if (p >= 1) panel.dc[p - 1] = 2.0 * p * panel.c[p];
        for (int k = p - 2; k >= 0; --k) panel.dc[k] = (k + 2 <= p ? panel.dc[k + 2] : 0.0) + 2.0 * (k + 1) * panel.c[k + 1];
        panel.dc[0] *= 0.5;
        const double scale = 2.0 / (panel.b - panel.a);
        for (cplx& d : panel.dc) d *= scale;
    }
    return out;
}

const PiecewiseChebyshev::Panel& PiecewiseChebyshev::locate(double x) const {
    auto it = std::upper_bound(panels_.begin(), panels_.end(), x, [](double v, const Panel& panel) { return v < panel.b; });
    if (it == panels_.end()) --it;
    return *it;
}

namespace {

cplx clenshaw(const std::vector<cplx>& c, double t) {
    cplx b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const cplx b0 = 2.0 * t * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

} // namespace

cplx PiecewiseChebyshev::operator()(double x) const {
    if (panels_.empty()) throw Error(ErrorKind::Domain, "PiecewiseChebyshev: empty interpolant");
    if (x < lower_) throw Error(ErrorKind::Domain, "PiecewiseChebyshev: argument below the table");
    if (x > upper_) return 0.0;
    const Panel& panel = locate(x);
    return clenshaw(panel.c, (2.0 * x - panel.a - panel.b) / (panel.b - panel.a));
}

cplx PiecewiseChebyshev::derivative(double x) const {
    if (panels_.empty()) throw Error(ErrorKind::Domain, "PiecewiseChebyshev: empty interpolant");
    if (x < lower_) throw Error(ErrorKind::Domain, "PiecewiseChebyshev: argument below the table");
    if (x > upper_) return 0.0;
    const Panel& panel = locate(x);
    return clenshaw(panel.dc, (2.0 * x - panel.a - panel.b) / (panel.b - panel.a));
}

// ---------------------------------------------------------------------------
// elementary transforms

double u_to_w(double u) {
    const double sh = std::sinh(0.5 * u);
    return 4.0 * sh * sh;
}

double w_to_u(double w) {
    if (w < 0.0) throw Error(ErrorKind::Domain, "w_to_u: w must be non-negative");
    return 2.0 * std::asinh(0.5 * std::sqrt(w));
}

cplx abel_transform(const RealFunction& k, double w, double tol, double abs_tol) {
    if (!(w >= 0.0)) throw Error(ErrorKind::Domain, "abel_transform: w must be non-negative");
    // t = w + v^2
    return 2.0 * integrate([&](double v) { return k(w + v * v); }, 0.0, inf, quad_spec(tol, 0.5 * abs_tol)).value;
}

cplx inverse_abel_transform(const RealFunction& dg, double t, double g_support, double tol, double abs_tol) {
    if (!(t >= 0.0)) throw Error(ErrorKind::Domain, "inverse_abel_transform: t must be non-negative");
    const double ut = w_to_u(t);
    if (ut >= g_support) return 0.0;
    // u = u_t + v^2, w(u) - t = 4 sinh(v^2/2) sinh(u_t + v^2/2)
    const Integrand f = [&](double v) -> cplx {
        const double v2 = v * v;
        const double root = std::sqrt(std::sinh(0.5 * v2)) * std::sqrt(std::sinh(ut + 0.5 * v2));
        if (!std::isfinite(root)) return 0.0;
        return dg(ut + v2) * (v / root);
    };
    const double upper = std::isinf(g_support) ? inf : std::sqrt(g_support - ut);
    const double n = std::isinf(upper) ? 1.0 : std::max(1.0, std::ceil(upper));
    const cplx value = std::isinf(upper) ? integrate(f, 0.0, inf, quad_spec(tol, pi * abs_tol)).value
                                         : integrate_pieces(f, 0.0, upper, 1.0, tol, pi * abs_tol / n);
    return -value / pi;
}

cplx even_fourier(const RealFunction& g, double xi, double support, double tol, double abs_tol) {
    const Integrand f = [&](double u) { return g(u); };
    if (std::isinf(support)) {
        if (xi == 0.0) return 2.0 * integrate(f, 0.0, inf, quad_spec(tol, 0.5 * abs_tol)).value;
        return 2.0 * integrate_fourier(f, std::abs(xi), FourierKind::Cosine, 0.0, quad_spec(tol, 0.5 * abs_tol)).value;
    }
    const double piece = xi == 0.0 ? support : std::max(0.5, 4.0 * pi / std::abs(xi));
    const double n = std::max(1.0, std::ceil(support / piece));
    const Integrand fc = [&](double u) { return g(u) * std::cos(xi * u); };
    return 2.0 * integrate_pieces(fc, 0.0, support, piece, tol, 0.5 * abs_tol / n);
}

cplx even_inverse_fourier(const RealFunction& h, double u, double support, double tol, double abs_tol) {
    return even_fourier(h, u, support, tol, 2.0 * pi * abs_tol) / (2.0 * pi);
}

// ---------------------------------------------------------------------------
// triples

SelbergTriple resolvent_triple(cplx s, cplx s0) {
    guard_resolvent(s, "resolvent_triple");
    guard_resolvent(s0, "resolvent_triple");
    const cplx al = s - 0.5, al0 = s0 - 0.5;
    SelbergTriple t;
    t.h = [al, al0](double xi) { return 1.0 / (xi * xi + al * al) - 1.0 / (xi * xi + al0 * al0); };
    auto g = [al, al0](double u) {
        const double x = std::abs(u);
        return std::exp(-al * x) / (2.0 * al) - std::exp(-al0 * x) / (2.0 * al0);
    };
    t.g = g;
    t.Q = [g](double w) { return g(w_to_u(w)); };
    t.dQ = [al, al0](double w) -> cplx {
        const double u = w_to_u(w);
        if (u < 1e-8) return 0.25 * (al - al0);
        // g'(u) = -(1/2) e^{-al0 u} expm1(-(al - al0) u)
        const cplx dg = -0.5 * std::exp(-al0 * u) * (std::exp(-(al - al0) * u) - 1.0);
        return dg / (2.0 * std::sinh(u));
    };
    t.k = [s, s0](double tt) -> cplx {
        if (tt == 0.0) return kernel_difference_at_zero(s, s0);
        return point_pair_k(s, tt) - point_pair_k(s0, tt);
    };
    const double rho = std::min(s.real(), s0.real()) - 1.0;
    t.decay = {rho, rho};
    return t;
}

SelbergTriple transform_chain(const RealFunction& input, ChainDirection direction, const TransformSpec& spec) {
    if (!(spec.tolerance > 0.0) || !(spec.cutoff > 0.0))
        throw Error(ErrorKind::Domain, "transform_chain: tolerances must be positive");
    const double rho = spec.decay.rho, delta = spec.decay.delta;
    const double quad_tol = std::max(1e-11, 0.1 * spec.tolerance);
    SelbergTriple out;
    out.decay = spec.decay;

    if (direction == ChainDirection::KtoH) {
        check_decay(input, [rho](double t) { return std::pow(1.0 + t, 1.0 + rho); }, {0.0, 1.0, 10.0},
                    {1e3, 1e4, 1e5, 1e6}, "k");
        auto k = std::make_shared<RealFunction>(input);
        const double k_abs = 0.1 * quad_tol * max_abs(input, 0.0, 4.0, 16);
        auto g_direct = [k, quad_tol, k_abs](double u) { return abel_transform(*k, u_to_w(u), quad_tol, k_abs); };
        const double g_scale = max_abs(g_direct, 0.0, 4.0, 16);
        if (g_scale == 0.0) throw Error(ErrorKind::Degeneracy, "transform_chain: input vanishes");
        const double U = support_end(g_direct, 1.0, spec.cutoff * g_scale, 700.0);
        auto g = std::make_shared<PiecewiseChebyshev>(
            PiecewiseChebyshev::fit(g_direct, 0.0, U, spec.tolerance * g_scale));
        const double g_abs = 0.1 * quad_tol * g_scale;
        auto h_direct = [g, U, quad_tol, g_abs](double xi) {
            return even_fourier([g](double u) { return (*g)(u); }, xi, U, quad_tol, g_abs);
        };
        const double h_scale = max_abs(h_direct, 0.0, 2.0, 8);
        const double X = support_end(h_direct, 1.0, spec.cutoff * h_scale, 1e4);
        auto h = std::make_shared<PiecewiseChebyshev>(
            PiecewiseChebyshev::fit(h_direct, 0.0, X, spec.tolerance * h_scale));
        out.k = input;
        out.Q = [k, quad_tol, k_abs](double w) { return abel_transform(*k, w, quad_tol, k_abs); };
        out.g = [g](double u) { return (*g)(std::abs(u)); };
        out.dQ = [g](double w) -> cplx {
            const double u = w_to_u(w);
            if (u < 1e-6) return 0.5 * g->derivative(1e-6) / std::sinh(1e-6);
            return g->derivative(u) / (2.0 * std::sinh(u));
        };
        out.h = [h](double xi) { return (*h)(std::abs(xi)); };
        out.g_support = U;
        out.h_support = X;
        return out;
    }

    const double Xin = spec.input_support;
    if (std::isinf(Xin))
        check_decay(input, [delta](double xi) { return std::pow(1.0 + xi, 2.0 + delta); }, {0.0, 1.0, 10.0},
                    {1e3, 1e4, 1e5, 1e6}, "h");
    auto hin = std::make_shared<RealFunction>(input);
    const double h_abs = 0.1 * quad_tol * max_abs(input, 0.0, 4.0, 16);
    auto g_direct = [hin, Xin, quad_tol, h_abs](double u) { return even_inverse_fourier(*hin, u, Xin, quad_tol, h_abs); };
    const double g_scale = max_abs(g_direct, 0.0, 4.0, 16);
    if (g_scale == 0.0) throw Error(ErrorKind::Degeneracy, "transform_chain: input vanishes");
    const double U = support_end(g_direct, 1.0, spec.cutoff * g_scale, 700.0);
    const double decay_rate = 0.5 + rho;
    const double gU = std::abs(g_direct(0.5 * U));
    if (gU > 10.0 * g_scale * std::exp(-decay_rate * 0.5 * U) + spec.cutoff * g_scale)
        throw Error(ErrorKind::DecayHypothesis, "transform_chain: g violates the declared exponential decay");
    auto g = std::make_shared<PiecewiseChebyshev>(PiecewiseChebyshev::fit(g_direct, 0.0, U, spec.tolerance * g_scale));
    out.h = input;
    out.g = [g](double u) { return (*g)(std::abs(u)); };
    out.Q = [g](double w) { return (*g)(w_to_u(w)); };
    out.dQ = [g](double w) -> cplx {
        const double u = w_to_u(w);
        if (u < 1e-6) return 0.5 * g->derivative(1e-6) / std::sinh(1e-6);
        return g->derivative(u) / (2.0 * std::sinh(u));
    };
    const double g_abs = 0.1 * quad_tol * g_scale;
    out.k = [g, U, quad_tol, g_abs](double t) {
        return inverse_abel_transform([g](double u) { return g->derivative(u); }, t, U, quad_tol, g_abs);
    };
    out.g_support = U;
    out.h_support = Xin;
    return out;
}

// ---------------------------------------------------------------------------
// identity term

cplx identity_term(cplx s, cplx s0) {
    guard_resolvent(s, "identity_term");
    guard_resolvent(s0, "identity_term");
    if (s == s0) return 0.0;
    const cplx al = s - 0.5, al0 = s0 - 0.5;
    const cplx d = al0 * al0 - al * al;
    // xi (h_s - h_s0) = xi d / ((xi^2 + al^2)(xi^2 + al0^2)); even integrand
    const Integrand f = [&](double xi) {
        const double x2 = xi * xi;
        return xi * d / ((x2 + al * al) * (x2 + al0 * al0)) * std::tanh(pi * xi);
    };
    QuadratureSpec spec = quad_spec(1e-12);
    spec.absolute_tolerance = 1e-15;
    const double split = std::max(1.0, 4.0 * std::max(std::abs(al), std::abs(al0)));
    const cplx near = integrate(f, 0.0, split, spec).value;
    const cplx far = integrate(f, split, inf, spec).value;
    return 2.0 * (near + far) / (4.0 * pi);
}

cplx identity_term_series(cplx s, cplx s0) {
    guard_resolvent(s, "identity_term_series");
    guard_resolvent(s0, "identity_term_series");
    // T_j(s) = Gamma(s+j)^2 / (j! Gamma(2s+j)) = (1/j)(1 + b1/j + e/j^2 + ...), b1 = -s^2, e = s^2(2s-1)/2 + s^4/2
    auto term = [](cplx a, int j) {
        return std::exp(2.0 * log_gamma(a + static_cast<double>(j)) - std::lgamma(j + 1.0) -
                        log_gamma(2.0 * a + static_cast<double>(j)));
    };
    const int N = 20000;
    std::vector<cplx> parts(N + 1);
    for (int j = 0; j <= N; ++j) parts[j] = term(s, j) - term(s0, j);
    cplx sum = 0.0;
    for (int j = N; j >= 0; --j) sum += parts[j];
    auto b1 = [](cplx a) { return -a * a; };
    auto e = [](cplx a) { return 0.5 * a * a * (2.0 * a - 1.0) + 0.5 * a * a * a * a; };
    const double n = N;
    const cplx tail = (b1(s) - b1(s0)) * (1.0 / n - 0.5 / (n * n)) + (e(s) - e(s0)) * 0.5 / (n * n);
    return (sum + tail) / (4.0 * pi);
}

cplx kernel_difference_at_zero(cplx s, cplx s0) {
    // k_s(t) - k_s0(t) = value at 0 + O(t log t)
    const double t = 1e-14;
    return point_pair_k(s, t) - point_pair_k(s0, t);
}

// ---------------------------------------------------------------------------
// geometric side

namespace {

void add_length(double ell, double weight, const RealFunction& g, const GeometricSideOptions& opts, GeometricSideResult& out,
                cplx& total) {
    if (!(ell > 0.0)) throw Error(ErrorKind::Domain, "geometric_side: lengths must be positive");
    const double beta = opts.decay_rate + 0.5;
    cplx sum = 0.0;
    int n = 0;
    double bound = inf;
    while (true) {
        ++n;
        const double x = n * ell;
        sum += ell * g(x) / (2.0 * std::sinh(0.5 * x));
        const double m = (n + 1) * ell;
        bound = weight * ell * opts.decay_constant * std::exp(-beta * m) / ((1.0 - std::exp(-m)) * (1.0 - std::exp(-beta * ell)));
        if (bound <= opts.tolerance * std::max(std::abs(total + weight * sum), 1e-300) || bound == 0.0) break;
        if (n >= opts.max_terms) {
            std::ostringstream msg;
            msg << "geometric_side: tail bound " << bound << " not reached within " << opts.max_terms << " terms";
            throw Error(ErrorKind::DecayHypothesis, msg.str());
        }
    }
    total += weight * sum;
    out.tail_bound += bound;
    out.terms = std::max(out.terms, n);
}

} // namespace

GeometricSideResult geometric_side(const std::vector<double>& lengths, const RealFunction& g, const GeometricSideOptions& opts) {
    if (!(opts.decay_rate > 0.0)) throw Error(ErrorKind::DecayHypothesis, "geometric_side: g needs exponential decay");
    GeometricSideResult out;
    cplx total = 0.0;
    for (double ell : lengths) add_length(ell, 2.0, g, opts, out, total);
    out.value = total;
    return out;
}

GeometricSideResult geometric_side(const LengthSpectrum& spectrum, const RealFunction& g, const GeometricSideOptions& opts) {
    if (!(opts.decay_rate > 0.0)) throw Error(ErrorKind::DecayHypothesis, "geometric_side: g needs exponential decay");
    GeometricSideResult out;
    cplx total = 0.0;
    for (const SpectrumEntry& e : spectrum.entries)
        if (e.primitive) add_length(e.length, 2.0 * e.multiplicity, g, opts, out, total);
    out.value = total;
    return out;
}

// ---------------------------------------------------------------------------
// cylinder trace check

TraceCheck cylinder_trace_check(double ell, const TraceConfig& config, double tol) {
    const cplx s = config.s, s0 = config.s0;
    if (!(s.real() > 1.0) || !(s0.real() > 1.0))
        throw Error(ErrorKind::Domain, "cylinder_trace_check: requires Re s > 1 and Re s0 > 1");
    if (!(ell > 0.0)) throw Error(ErrorKind::Domain, "cylinder_trace_check: requires l > 0");
    if (!(config.A > 0.0)) throw Error(ErrorKind::Domain, "cylinder_trace_check: requires A > 0");
    if (config.sign != 1 && config.sign != -1) throw Error(ErrorKind::Domain, "cylinder_trace_check: sign must be +1 or -1");
    if (!(tol > 0.0)) throw Error(ErrorKind::Domain, "cylinder_trace_check: tol must be positive");

    TraceCheck out;
    const double l2 = ell * ell;
    const double sig = std::min(s.real(), s0.real());
    const double M = point_pair_bound(s) + point_pair_bound(s0);

    // sum over n != 0 of (k_s - k_s0)(c_n (l^2 + a^2)); c_{n+1} >= e^l c_n bounds the tail
    double worst_tail = 0.0;
    auto orbit_sum = [&](double a, double& tail) {
        cplx sum = 0.0;
        for (int n = 1;; ++n) {
            const double t = displacement_factor(ell, n) * (l2 + a * a);
            sum += point_pair_k(s, t) - point_pair_k(s0, t);
            const double tn = displacement_factor(ell, n + 1) * (l2 + a * a);
            tail = 2.0 * M * std::pow(tn, -sig) / (1.0 - std::exp(-sig * ell));
            if (tail < 1e-3 * tol * std::max(1.0, std::abs(sum))) break;
            if (n > 100000) throw Error(ErrorKind::Tolerance, "cylinder_trace_check: orbit sum did not converge");
        }
        return 2.0 * sum;
    };
    QuadratureSpec spec = quad_spec(1e-13);
    spec.absolute_tolerance = 0.01 * tol;
    const QuadratureResult near = integrate(
        [&](double a) {
            double tail = 0.0;
            const cplx v = orbit_sum(a, tail);
            worst_tail = std::max(worst_tail, tail);
            return v;
        },
        0.0, config.A, spec);
    out.near_part = 2.0 * near.value;
    out.near_tail_bound = 2.0 * config.A * worst_tail + 2.0 * near.error;

    const RemainderResult rs = remainder_integral_detail(ell, s, config.A, 0.1 * tol);
    const RemainderResult r0 = remainder_integral_detail(ell, s0, config.A, 0.1 * tol);
    out.far_part = 2.0 * (rs.value - r0.value);
    out.far_tail_bound = 2.0 * (rs.error + r0.error);
    out.lhs = static_cast<double>(config.sign) * (out.near_part + out.far_part);

    const SelbergTriple tri = resolvent_triple(s, s0);
    GeometricSideOptions gopts;
    gopts.decay_rate = sig - 0.5;
    gopts.decay_constant = 1.0 / std::abs(2.0 * s - 1.0) + 1.0 / std::abs(2.0 * s0 - 1.0);
    const GeometricSideResult geo = geometric_side(std::vector<double>{ell}, tri.g, gopts);
    out.rhs = static_cast<double>(config.sign) * geo.value;
    out.geometric_tail_bound = geo.tail_bound;
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

} // namespace pinchlab
