#include "pinchlab/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace pinchlab {

namespace {

constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

constexpr double epmach = std::numeric_limits<double>::epsilon();

struct Panel {
    double a = 0.0;
    double b = 0.0;
    cplx value{};
    double error = 0.0;
    std::uint64_t order = 0;
};

struct PanelLess {
    bool operator()(const Panel& x, const Panel& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.order > y.order;
    }
};

Panel gauss_kronrod(const Integrand& g, double a, double b, std::int64_t& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::array<cplx, 15> fv;
    const cplx fc = g(c);
    fv[14] = fc;
    cplx resk = fc * wgk[7];
    cplx resg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double x = h * xgk[j];
        const cplx f1 = g(c - x);
        const cplx f2 = g(c + x);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        resk += wgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    evals += 15;
    const cplx mean = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fc - mean);
    double resabs = wgk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        resasc += wgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
        resabs += wgk[j] * (std::abs(fv[2 * j]) + std::abs(fv[2 * j + 1]));
    }
    resasc *= std::abs(h);
    resabs *= std::abs(h);
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * epmach)) err = std::max(50.0 * epmach * resabs, err);
    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * h;
    p.error = err;
    if (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag())) p.error = inf;
    return p;
}

QuadratureResult adaptive(const Integrand& g, double a, double b, const QuadratureSpec& spec) {
    QuadratureResult out;
    if (a == b) return out;
    std::priority_queue<Panel, std::vector<Panel>, PanelLess> heap;
    std::uint64_t order = 0;
    Panel first = gauss_kronrod(g, a, b, out.evaluations);
    first.order = order++;
    cplx total = first.value;
    double total_err = first.error;
    heap.push(first);
    int subdivisions = 1;
    bool converged = false;
    while (true) {
        if (total_err <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total))) {
            converged = true;
            break;
        }
        if (subdivisions >= spec.max_subdivisions) break;
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) break;
        heap.pop();
        Panel left = gauss_kronrod(g, worst.a, mid, out.evaluations);
        Panel right = gauss_kronrod(g, mid, worst.b, out.evaluations);
        left.order = order++;
        right.order = order++;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // deterministic final summation in panel order
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    cplx value = 0.0;
    double err = 0.0;
    for (const auto& p : panels) {
        value += p.value;
        err += p.error;
    }
    out.value = value;
    out.error = err;
    out.converged = converged || err <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(value));
    return out;
}

void accumulate(QuadratureResult& into, const QuadratureResult& part) {
    into.value += part.value;
    into.error += part.error;
    into.evaluations += part.evaluations;
    into.converged = into.converged && part.converged;
}

QuadratureResult finite(const Integrand& f, double a, double b, double alpha_a, double alpha_b,
                        const QuadratureSpec& spec) {
    if (alpha_a >= 1.0 || alpha_b >= 1.0) {
        throw Error(ErrorKind::InvalidInterval, "integrate: endpoint singularity exponent must be < 1");
    }
    if (alpha_a > 0.0 && alpha_b > 0.0) {
        const double m = 0.5 * (a + b);
        QuadratureResult r = finite(f, a, m, alpha_a, 0.0, spec);
        accumulate(r, finite(f, m, b, 0.0, alpha_b, spec));
        return r;
    }
    if (alpha_a > 0.0) {
        const double p = 1.0 / (1.0 - alpha_a);
        const double w = b - a;
        auto g = [&](double t) {
            return f(a + w * std::pow(t, p)) * (w * p * std::pow(t, p - 1.0));
        };
        return adaptive(g, 0.0, 1.0, spec);
    }
    if (alpha_b > 0.0) {
        const double p = 1.0 / (1.0 - alpha_b);
        const double w = b - a;
        auto g = [&](double t) {
            return f(b - w * std::pow(t, p)) * (w * p * std::pow(t, p - 1.0));
        };
        return adaptive(g, 0.0, 1.0, spec);
    }
    return adaptive(f, a, b, spec);
}

// integral over [A, inf)
QuadratureResult upper_tail(const Integrand& f, double A, double alpha_a,
                            const std::function<double(double)>& tail_bound,
                            const QuadratureSpec& spec) {
    QuadratureResult out;
    double start = A;
    if (alpha_a > 0.0) {
        accumulate(out, finite(f, A, A + 1.0, alpha_a, 0.0, spec));
        start = A + 1.0;
    }
    if (spec.semi_infinite_cutoff_policy == TailPolicy::Truncate) {
        if (!tail_bound) {
            throw Error(ErrorKind::InvalidInterval, "integrate: Truncate policy needs a tail bound");
        }
        const double target = 0.25 * spec.absolute_tolerance;
        double width = 1.0;
        double B = start + width;
        double tb = tail_bound(B);
        int guard = 0;
        while (!(tb <= target)) {
            width *= 2.0;
            B = start + width;
            tb = tail_bound(B);
            if (++guard > 200) throw Error(ErrorKind::Tolerance, "integrate: tail bound never falls below tolerance");
        }
        accumulate(out, adaptive(f, start, B, spec));
        out.error += tb;
        return out;
    }
    auto g = [&](double t) {
        const double x = start + (1.0 - t) / t;
        return f(x) / (t * t);
    };
    accumulate(out, adaptive(g, 0.0, 1.0, spec));
    return out;
}

void check(const QuadratureResult& r, const QuadratureSpec& spec) {
    if (!r.converged && spec.throw_on_failure) {
        std::ostringstream msg;
        msg << "integrate: tolerance not met (value=" << r.value << ", error=" << r.error
            << ", evaluations=" << r.evaluations << ")";
        throw Error(ErrorKind::Tolerance, msg.str());
    }
}

} // namespace

QuadratureResult integrate(const Integrand& f, const IntegrationRange& range, const QuadratureSpec& spec) {
    if (!(spec.relative_tolerance > 0.0) || !(spec.absolute_tolerance > 0.0) || spec.max_subdivisions < 1) {
        throw Error(ErrorKind::InvalidInterval, "integrate: invalid quadrature spec");
    }
    const double a = range.lower;
    const double b = range.upper;
    if (std::isnan(a) || std::isnan(b) || !(a < b)) {
        std::ostringstream msg;
        msg << "integrate: invalid interval [" << a << ", " << b << "]";
        throw Error(ErrorKind::InvalidInterval, msg.str());
    }
    QuadratureResult r;
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (!lo_inf && !hi_inf) {
        r = finite(f, a, b, range.lower_singularity, range.upper_singularity, spec);
    } else if (!lo_inf && hi_inf) {
        r = upper_tail(f, a, range.lower_singularity, range.tail_bound, spec);
    } else if (lo_inf && !hi_inf) {
        Integrand reflected = [&](double x) { return f(-x); };
        r = upper_tail(reflected, -b, range.upper_singularity, range.tail_bound, spec);
    } else {
        Integrand reflected = [&](double x) { return f(-x); };
        r = upper_tail(f, 0.0, 0.0, range.tail_bound, spec);
        accumulate(r, upper_tail(reflected, 0.0, 0.0, range.tail_bound, spec));
    }
    check(r, spec);
    return r;
}

QuadratureResult integrate(const Integrand& f, double lower, double upper, const QuadratureSpec& spec) {
    IntegrationRange range;
    range.lower = lower;
    range.upper = upper;
    return integrate(f, range, spec);
}

namespace {

// Wynn epsilon extrapolation of a sequence of partial sums; returns the
// estimate and the difference of the two latest estimates.
std::pair<cplx, double> wynn_epsilon(const std::vector<cplx>& s) {
    const std::size_t n = s.size();
    std::vector<cplx> prev(n, 0.0);
    std::vector<cplx> cur = s;
    cplx best = s.back();
    cplx last_even = s.back();
    double diff = inf;
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<cplx> next(n - k);
        bool ok = true;
        for (std::size_t i = 0; i + k < n; ++i) {
            const cplx d = cur[i + 1] - cur[i];
            if (d == 0.0) {
                ok = false;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / d;
        }
        if (!ok) break;
        prev = cur;
        cur = next;
        if (k % 2 == 0) {
            diff = std::abs(cur.back() - last_even);
            last_even = cur.back();
            best = cur.back();
        }
        if (cur.size() < 2) break;
    }
    return {best, diff};
}

} // namespace

QuadratureResult integrate_fourier(const Integrand& f, double omega, FourierKind kind, double lower,
                                   const QuadratureSpec& spec) {
    QuadratureSpec inner = spec;
    inner.throw_on_failure = false;
    inner.absolute_tolerance = 1e-2 * spec.absolute_tolerance;
    if (omega < 0.0) {
        omega = -omega;
        if (kind == FourierKind::Sine) {
            QuadratureResult r = integrate_fourier(f, omega, kind, lower, spec);
            r.value = -r.value;
            return r;
        }
    }
    auto trig = [kind](double x) { return kind == FourierKind::Cosine ? std::cos(x) : std::sin(x); };
    Integrand g = [&](double x) { return f(x) * trig(omega * x); };
    if (omega == 0.0) {
        IntegrationRange range;
        range.lower = lower;
        range.upper = inf;
        QuadratureResult r = integrate(g, range, inner);
        check(r, spec);
        return r;
    }
    const double half = pi / omega;
    const double offset = kind == FourierKind::Cosine ? 0.5 : 0.0;
    double k0 = std::floor(lower / half - offset) + 1.0;
    double z = (k0 + offset) * half;
    QuadratureResult out;
    {
        QuadratureResult first = adaptive(g, lower, z, inner);
        accumulate(out, first);
    }
    std::vector<cplx> partial{out.value};
    double cycle_error = out.error;
    constexpr int max_cycles = 4000;
    constexpr std::size_t window = 40;
    cplx estimate = out.value;
    double estimate_error = inf;
    int small = 0;
    for (int k = 0; k < max_cycles; ++k) {
        const double z1 = z + half;
        QuadratureResult piece = adaptive(g, z, z1, inner);
        out.evaluations += piece.evaluations;
        out.converged = out.converged && piece.converged;
        cycle_error += piece.error;
        const cplx s = partial.back() + piece.value;
        partial.push_back(s);
        z = z1;
        const double target = std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(s));
        if (std::abs(piece.value) < 1e-3 * target) {
            if (++small >= 3) {
                estimate = s;
                estimate_error = std::abs(piece.value);
                break;
            }
        } else {
            small = 0;
        }
        if (partial.size() >= 8) {
            std::vector<cplx> tailseq(partial.size() > window ? partial.end() - window : partial.begin(),
                                      partial.end());
            auto [est, diff] = wynn_epsilon(tailseq);
            if (diff < 0.25 * target && k >= 10) {
                estimate = est;
                estimate_error = diff;
                break;
            }
            estimate = est;
            estimate_error = diff;
        }
    }
    out.value = estimate;
    out.error = estimate_error + cycle_error;
    out.converged = out.converged &&
                    out.error <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(out.value));
    check(out, spec);
    return out;
}

} // namespace pinchlab
