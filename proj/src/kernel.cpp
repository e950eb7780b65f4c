#include "pinchlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "pinchlab/parallel.hpp"

namespace pinchlab {

namespace {

void check_s(cplx s, const char* where) {
    if (!(s.real() > 0.5)) throw Error(ErrorKind::Domain, std::string(where) + ": requires Re s > 1/2");
}

cplx log_beta(cplx s) { return 2.0 * log_gamma(s) - log_gamma(2.0 * s); }

cplx k_series(cplx s, double t, double tol) {
    const double z = 4.0 / (4.0 + t);
    if (z > 0.99) throw Error(ErrorKind::Domain, "point_pair_k: series needs t > 4/99 (use quadrature)");
    cplx term = 1.0, sum = 1.0;
    for (int j = 0; j < 100000; ++j) {
        const double dj = j;
        term *= (s + dj) * (s + dj) * z / ((2.0 * s + dj) * (dj + 1.0));
        sum += term;
        if (std::abs(term) * z / (1.0 - z) <= tol * std::abs(sum)) {
            return std::exp(log_beta(s) + s * std::log(z)) * sum / (4.0 * pi);
        }
    }
    throw Error(ErrorKind::Tolerance, "point_pair_k: series did not converge");
}

// expansion of F(s,s;2s;z) about z = 1 (logarithmic case)
cplx k_log(cplx s, double t, double tol) {
    const double w = t / (4.0 + t);
    const double z = 4.0 / (4.0 + t);
    const double lw = std::log(t) - std::log(4.0 + t);
    cplx psi_s = digamma(s);
    double psi_1 = -std::numbers::egamma;
    cplx coef = 1.0;
    cplx sum = 2.0 * psi_1 - 2.0 * psi_s - lw;
    for (int n = 0; n < 100000; ++n) {
        const double dn = n;
        coef *= (s + dn) * (s + dn) / ((dn + 1.0) * (dn + 1.0)) * w;
        psi_1 += 1.0 / (dn + 1.0);
        psi_s += 1.0 / (s + dn);
        const cplx term = coef * (2.0 * psi_1 - 2.0 * psi_s - lw);
        sum += term;
        if (std::abs(term) * w / (1.0 - w) * 2.0 <= tol * std::abs(sum)) return std::exp(s * std::log(z)) * sum / (4.0 * pi);
    }
    throw Error(ErrorKind::Tolerance, "point_pair_k: logarithmic expansion did not converge");
}

cplx k_quadrature(cplx s, double t, double tol) {
    // integrand in terms of x and 1 - x, both given to full precision
    auto f = [&](double x, double y) -> cplx {
        if (x <= 0.0 || y <= 0.0) return 0.0;
        return std::exp((s - 1.0) * std::log(x * y) - s * std::log(4.0 * x + t));
    };
    QuadratureSpec spec;
    spec.relative_tolerance = std::max(tol, 1e-12);
    spec.absolute_tolerance = 1e-300;
    // the peak of width t/4 at x = 0 gets its own panel; the endpoint pieces use
    // x = c e^{-v}, which turns x^{s-1} dx into the smooth decaying c^s e^{-s v} dv
    const double c = std::min(0.25 * t, 0.25);
    const Integrand left = [&](double v) -> cplx {
        const double x = c * std::exp(-v);
        return f(x, 1.0 - x) * x;
    };
    const Integrand middle = [&](double x) -> cplx { return f(x, 1.0 - x); };
    const Integrand right = [&](double v) -> cplx {
        const double y = 0.5 * std::exp(-v);
        return f(1.0 - y, y) * y;
    };
    cplx total = integrate(left, 0.0, inf, spec).value;
    total += integrate(middle, c, 0.5, spec).value;
    total += integrate(right, 0.0, inf, spec).value;
    return std::exp((s - 1.0) * std::log(4.0)) / pi * total;
}

/// sum over n > N of (c_n)^{-p} style tails for the cylinder: bound on
/// sum_{|m| > N} sigma_m^{-p} where sigma_m >= rr (|m| - 1/2)^2 and, for l > 0,
/// sigma_m >= rr e^{l(|m| - 1/2)}/(2 l^2) once e^{l(N + 1/2)} >= 4.
double cylinder_tail(double ell, double rr, double p, std::int64_t N) {
    const double n = static_cast<double>(N);
    double b = 2.0 * std::pow(rr, -p) * std::pow(n - 0.5, 1.0 - 2.0 * p) / (2.0 * p - 1.0);
    if (ell > 0.0 && ell * (n + 0.5) >= std::log(4.0)) {
        const double e = 2.0 * std::pow(2.0 * ell * ell / rr, p) * std::exp(-p * ell * (n + 0.5)) /
                         (1.0 - std::exp(-p * ell));
        b = std::min(b, e);
    }
    return b;
}

constexpr std::int64_t max_cylinder_terms = std::int64_t{1} << 22;

std::int64_t cylinder_cutoff(double ell, double rr, double p, double scale, double tol, const char* where) {
    std::int64_t N = 4;
    while (scale * cylinder_tail(ell, rr, p, N) > tol) {
        if (N >= max_cylinder_terms) {
            std::ostringstream msg;
            msg << where << ": tail not certifiable within " << max_cylinder_terms << " terms (bound "
                << scale * cylinder_tail(ell, rr, p, N) << " > tol " << tol << ")";
            throw Error(ErrorKind::Tolerance, msg.str());
        }
        N *= 2;
    }
    // shrink back to the smallest power-of-two refinement that still passes
    std::int64_t lo = N / 2, hi = N;
    while (hi - lo > 1) {
        const std::int64_t mid = (lo + hi) / 2;
        if (scale * cylinder_tail(ell, rr, p, mid) <= tol)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

template <class F>
cplx pairwise_sum(const F& term, std::int64_t lo, std::int64_t hi) {
    if (hi - lo <= 16) {
        cplx s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) s += term(i);
        return s;
    }
    const std::int64_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(term, lo, mid) + pairwise_sum(term, mid, hi);
}

double rho_product(double ell, double a1, double a2) {
    if (ell == 0.0) return a1 * a2;
    return std::sqrt((ell * ell + a1 * a1) * (ell * ell + a2 * a2));
}

} // namespace

cplx point_pair_k(cplx s, double t, KernelMethod method, double tol) {
    check_s(s, "point_pair_k");
    if (!(t > 0.0)) {
        if (t == 0.0) throw Error(ErrorKind::Domain, "point_pair_k: k_s has a logarithmic singularity at t = 0");
        throw Error(ErrorKind::Domain, "point_pair_k: t must be non-negative");
    }
    if (std::isinf(t)) return 0.0;
    switch (method) {
    case KernelMethod::Series:
        return k_series(s, t, tol);
    case KernelMethod::Quadrature:
        return k_quadrature(s, t, tol);
    case KernelMethod::Auto:
        break;
    }
    if (4.0 / (4.0 + t) <= 0.9) return k_series(s, t, tol);
    return k_log(s, t, tol);
}

double point_pair_bound(cplx s) {
    check_s(s, "point_pair_bound");
    const double sigma = s.real();
    return std::exp((sigma - 1.0) * std::log(4.0) + log_beta(sigma).real()) / pi;
}

KernelSum cylinder_kernel_detail(double ell, cplx s, const CylinderPoint& p1, const CylinderPoint& p2, double tol) {
    check_s(s, "cylinder_kernel");
    if (ell < 0.0) throw Error(ErrorKind::Domain, "cylinder_kernel: negative length");
    if (ell == 0.0 && (p1.a == 0.0 || p2.a == 0.0))
        throw Error(ErrorKind::Domain, "cylinder_kernel: a-coordinates must be nonzero for l = 0");
    if (!(tol > 0.0)) throw Error(ErrorKind::Domain, "cylinder_kernel: tol must be positive");
    KernelSum out;
    if (ell == 0.0 && p1.a * p2.a < 0.0) return out;
    const double dx = p1.x - p2.x;
    const double u = dx - std::round(dx);
    if (u == 0.0 && p1.a == p2.a) throw Error(ErrorKind::Domain, "cylinder_kernel: points lie on a common orbit");
    const double p = s.real();
    const double M = point_pair_bound(s);
    const double rr = rho_product(ell, p1.a, p2.a);
    const std::int64_t N = cylinder_cutoff(ell, rr, p, M, tol, "cylinder_kernel");
    auto term = [&](std::int64_t i) {
        const double m = static_cast<double>(i - N);
        return point_pair_k(s, sigma(ell, {u, p1.a}, {m, p2.a}));
    };
    out.value = pairwise_sum(term, 0, 2 * N + 1);
    out.tail_bound = M * cylinder_tail(ell, rr, p, N);
    out.terms = N;
    return out;
}

cplx cylinder_kernel(double ell, cplx s, const CylinderPoint& p1, const CylinderPoint& p2, double tol) {
    return cylinder_kernel_detail(ell, s, p1, p2, tol).value;
}

double g_bound(double ell, double a1, double a2, double r) {
    if (!(r > 0.5)) throw Error(ErrorKind::Domain, "g_bound: requires r > 1/2");
    if (ell < 0.0) throw Error(ErrorKind::Domain, "g_bound: negative length");
    const double p = a1 * a2;
    if (ell == 0.0) {
        if (p == 0.0) throw Error(ErrorKind::Domain, "g_bound: a1 a2 = 0 for l = 0");
        if (p < 0.0) return 0.0;
        const double d = a1 - a2;
        return std::pow(p + d * d, 0.5 - r) * std::pow(p, r - 1.0);
    }
    const double l2 = ell * ell;
    const double d = a1 - a2;
    const double D = (l2 + p) * (l2 + p) + l2 * d * d;
    const double root = std::sqrt(D);
    // sqrt(D) - (l^2 + p) without cancellation
    const double diff = (l2 + p) > 0.0 ? l2 * d * d / (root + l2 + p) : root - (l2 + p);
    return std::pow(1.0 + 2.0 * diff / l2, 0.5 - r) * std::pow(D, -0.25);
}

double hs_sum(double ell, const CylinderPoint& p1, const CylinderPoint& p2, double r, double tol) {
    if (!(r > 0.5)) throw Error(ErrorKind::Domain, "hs_sum: requires r > 1/2");
    if (ell == 0.0 && p1.a * p2.a < 0.0) return 0.0;
    const double dx = p1.x - p2.x;
    const double u = dx - std::round(dx);
    const double rr = rho_product(ell, p1.a, p2.a);
    const std::int64_t N = cylinder_cutoff(ell, rr, r, 1.0, tol, "hs_sum");
    auto term = [&](std::int64_t i) -> cplx {
        const double m = static_cast<double>(i - N);
        return std::pow(1.0 + sigma(ell, {u, p1.a}, {m, p2.a}), -r);
    };
    return pairwise_sum(term, 0, 2 * N + 1).real();
}

double hs_bound(double ell, double a1, double a2, double r) {
    const double c1 = std::sqrt(pi) * std::exp(std::lgamma(2.0 * r - 0.5) - std::lgamma(2.0 * r));
    const double c2 = pi * std::exp(2.0 * (std::lgamma(r - 0.5) - std::lgamma(r)));
    const double g = g_bound(ell, a1, a2, r);
    return c1 * g_bound(ell, a1, a2, 2.0 * r) + c2 * g * g;
}

double displacement_factor(double ell, int n) {
    if (ell == 0.0) return static_cast<double>(n) * n;
    const double sh = std::sinh(0.5 * ell * n);
    return 4.0 * sh * sh / (ell * ell);
}

double remainder_a_tail_estimate(cplx s, double B) {
    check_s(s, "remainder_a_tail_estimate");
    if (!(B > 0.0)) throw Error(ErrorKind::Domain, "remainder_a_tail_estimate: B must be positive");
    const double p = s.real();
    return boost::math::zeta(2.0 * p) / (p - 0.5) * std::pow(B, 1.0 - 2.0 * p);
}

RemainderResult remainder_integral_detail(double ell, cplx s, double A, double tol) {
    check_s(s, "remainder_integral");
    if (ell < 0.0) throw Error(ErrorKind::Domain, "remainder_integral: negative length");
    if (!(A > 0.0)) throw Error(ErrorKind::Domain, "remainder_integral: A must be positive");
    if (!(tol > 0.0)) throw Error(ErrorKind::Domain, "remainder_integral: tol must be positive");
    const double p = s.real();
    const double M = point_pair_bound(s);
    // |I_n| <= M c_n^{-p} A^{1-2p}/(2p-1), c_n >= n^2 and c_n >= e^{n l}/(2 l^2) once e^{n l} >= 4
    const double scale = 2.0 * M * std::pow(A, 1.0 - 2.0 * p) / (2.0 * p - 1.0);
    auto n_tail = [&](std::int64_t N) {
        const double n = static_cast<double>(N);
        double b = std::pow(n, 1.0 - 2.0 * p) / (2.0 * p - 1.0);
        if (ell > 0.0 && ell * (n + 1.0) >= std::log(4.0))
            b = std::min(b, std::pow(2.0 * ell * ell, p) * std::exp(-p * ell * (n + 1.0)) / (1.0 - std::exp(-p * ell)));
        return scale * b;
    };
    std::int64_t N = 1;
    while (n_tail(N) > 0.5 * tol) {
        if (N >= (std::int64_t{1} << 24)) {
            std::ostringstream msg;
            msg << "remainder_integral: n-tail bound " << n_tail(N) << " not below tol " << tol;
            throw Error(ErrorKind::Tolerance, msg.str());
        }
        N *= 2;
    }
    std::int64_t lo = N / 2, hi = N;
    while (hi - lo > 1) {
        const std::int64_t mid = (lo + hi) / 2;
        if (n_tail(mid) <= 0.5 * tol)
            hi = mid;
        else
            lo = mid;
    }
    N = std::max<std::int64_t>(hi, 1);

    std::vector<QuadratureResult> parts(static_cast<std::size_t>(N));
    const double l2 = ell * ell;
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-12;
    spec.absolute_tolerance = 0.25 * tol / static_cast<double>(N);
    parallel_for(parts.size(), [&](std::size_t k) {
        const double c = displacement_factor(ell, static_cast<int>(k + 1));
        const Integrand f = [&, c](double a) { return point_pair_k(s, c * (l2 + a * a)); };
        parts[k] = integrate(f, A, inf, spec);
    });
    RemainderResult out;
    out.value = 2.0 * pairwise_sum([&](std::int64_t i) { return parts[static_cast<std::size_t>(i)].value; },
                                   0, static_cast<std::int64_t>(N));
    for (const auto& q : parts) out.error += 2.0 * q.error;
    out.n_tail_bound = n_tail(N);
    out.error += out.n_tail_bound;
    out.terms = N;
    if (out.error > tol) {
        std::ostringstream msg;
        msg << "remainder_integral: error estimate " << out.error << " exceeds tol " << tol;
        throw Error(ErrorKind::Tolerance, msg.str());
    }
    return out;
}

cplx remainder_integral(double ell, cplx s, double A, double tol) {
    return remainder_integral_detail(ell, s, A, tol).value;
}

} // namespace pinchlab
