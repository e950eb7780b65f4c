#include "pinchlab/zeta.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pinchlab {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void check_length(double ell, const char* who) {
    if (!(ell > 0.0) || !std::isfinite(ell)) {
        std::ostringstream msg;
        msg << who << ": length must be positive (got " << ell << ")";
        throw Error(ErrorKind::Domain, msg.str());
    }
}

/// 2 sum_{k >= k0} log(1 - e^{-(w+k) l}) with truncation data.
ZetaResult log_product_from(double ell, cplx w, int k0, double tol) {
    ZetaResult r;
    cplx sum = 0.0;
    int k = k0;
    constexpr int max_terms = 50000000;
    for (;; ++k) {
        const cplx y = (w + static_cast<double>(k)) * ell;
        const cplx x = std::exp(-y);
        const double ax = std::abs(x);
        const double re = y.real();
        if (re > 0.0 && ax < tol * (-std::expm1(-re))) {
            // geometric tail: sum_j 2|x| e^{-j l} / (1 - |x|)
            r.error = 2.0 * ax / ((1.0 - ax) * (-std::expm1(-ell)));
            break;
        }
        if (k - k0 > max_terms) throw Error(ErrorKind::Convergence, "zeta_factor: product did not converge");
        if (x == 1.0) {
            sum = {-inf, 0.0};
            continue;
        }
        sum += 2.0 * log1p(-x);
    }
    r.log_value = sum;
    r.terms = k - k0;
    r.value = std::exp(sum);
    return r;
}

} // namespace

ZetaResult zeta_factor_detail(double ell, cplx s, double tol) {
    check_length(ell, "zeta_factor");
    return log_product_from(ell, s, 0, tol);
}

cplx zeta_factor(double ell, cplx s, double tol) { return zeta_factor_detail(ell, s, tol).value; }

ZetaResult zeta_truncated_detail(const LengthSpectrum& spectrum, cplx s, double tol) {
    ZetaResult r;
    r.log_value = 0.0;
    for (const auto& e : spectrum.entries) {
        if (!e.primitive) continue;
        const ZetaResult f = zeta_factor_detail(e.length, s, tol);
        r.log_value += static_cast<double>(e.multiplicity) * f.log_value;
        r.error += e.multiplicity * f.error;
        r.terms = std::max(r.terms, f.terms);
    }
    r.value = std::exp(r.log_value);
    return r;
}

cplx zeta_truncated(const LengthSpectrum& spectrum, cplx s, double tol) {
    return zeta_truncated_detail(spectrum, s, tol).value;
}

cplx log_gamma_sq_zeta(double ell, cplx w, double tol) {
    check_length(ell, "log_gamma_sq_zeta");
    int K = 0;
    while (w.real() + K < 0.5) ++K;
    // Gamma(w)^2 (1 - e^{-(w+k) l})^2 = Gamma(w+K)^2 prod_{k<K} (l phi((w+k) l))^2, phi(y) = (1 - e^{-y})/y
    cplx sum = 2.0 * log_gamma(w + static_cast<double>(K));
    for (int k = 0; k < K; ++k) {
        const cplx y = (w + static_cast<double>(k)) * ell;
        const cplx phi = y == 0.0 ? cplx(1.0) : -expm1(-y) / y;
        if (phi == 0.0) return {-inf, 0.0};
        sum += 2.0 * (std::log(ell) + std::log(phi));
    }
    return sum + log_product_from(ell, w, K, tol).log_value;
}

cplx pinch_asymptotic(double ell, cplx s) {
    check_length(ell, "pinch_asymptotic");
    return std::exp(log_gamma_sq_zeta(ell, s) + pi * pi / (3.0 * ell) + (2.0 * s - 1.0) * std::log(ell));
}

PinchSplit pinch_split(double ell, cplx s, double tol) {
    check_length(ell, "pinch_split");
    if (!(s.real() > 0.0)) throw Error(ErrorKind::Domain, "pinch_split: needs Re s > 0");
    PinchSplit p;
    p.log_zeta = zeta_factor_detail(ell, s, tol).log_value;
    const cplx q = std::exp(-s * ell);
    p.log_term = log1p(-q);
    p.dilog_term = -2.0 / ell * dilog(q);
    p.dilog_reflected = -pi * pi / (3.0 * ell) - 2.0 * s * p.log_term + 2.0 / ell * dilog(-expm1(-s * ell));
    cplx sum = 0.0;
    for (int n = 1; n < 100000000; ++n) {
        const double nl = n * ell;
        // (e^{x}-1)^{-1} - 1/x + 1/2, with its Taylor form for small x
        const double br = nl < 1e-3 ? nl / 12.0 - nl * nl * nl / 720.0 : 1.0 / std::expm1(nl) - 1.0 / nl + 0.5;
        const cplx term = std::exp(-s * nl) / static_cast<double>(n) * br;
        sum += term;
        if (std::abs(term) < tol * std::abs(sum) && std::exp(-s.real() * nl) < tol) break;
    }
    p.binet_sum = -2.0 * sum;
    p.binet_limit = -2.0 * log_gamma(s) + (2.0 * s - 1.0) * std::log(s) - 2.0 * s + std::log(2.0 * pi);
    return p;
}

LogDerivResult log_deriv_factor(double ell, cplx s, double tol) {
    check_length(ell, "log_deriv_factor");
    LogDerivResult r;
    constexpr int max_terms = 50000000;
    cplx sum = 0.0;
    int k = 0;
    for (;; ++k) {
        const cplx y = (s + static_cast<double>(k)) * ell;
        const cplx x = std::exp(-y);
        const double ax = std::abs(x);
        if (y.real() > 0.0) {
            const double tail = 2.0 * ell * ax / ((1.0 - ax) * (-std::expm1(-ell)));
            if (tail < tol * std::max(1.0, std::abs(sum)) || tail == 0.0) break;
        }
        if (k > max_terms) {
            r.converged = false;
            break;
        }
        sum += 2.0 * ell * x / (-expm1(-y));
    }
    r.value = sum;
    r.k_terms = k;
    if (s.real() > 0.5) {
        cplx nsum = 0.0;
        int n = 1;
        const double decay = (s.real() - 0.5) * ell;
        for (;; ++n) {
            const double nl = n * ell;
            const cplx term = ell * std::exp(-(s - 0.5) * nl) / (2.0 * std::sinh(0.5 * nl));
            nsum += term;
            const double tail = std::abs(term) / (-std::expm1(-decay - 0.5 * ell));
            if (tail < 0.1 * tol * std::max(1.0, std::abs(nsum))) break;
            if (n > max_terms) {
                r.converged = false;
                break;
            }
        }
        // sum over both orientations of l g_s(n l) / (2 sinh(|n| l / 2)), g_s(u) = e^{-(s-1/2)|u|}/(2s-1)
        const cplx both = 2.0 * nsum / (2.0 * s - 1.0);
        r.n_sum_value = (2.0 * s - 1.0) * both;
        r.n_terms = n;
    } else {
        r.n_sum_value = {nan, nan};
    }
    return r;
}

cplx lhp_reduction_ratio(double ell, cplx s) {
    check_length(ell, "lhp_reduction_ratio");
    return std::exp(log_gamma_sq_zeta(ell, s) + (4.0 * s - 2.0) * std::log(ell) - log_gamma_sq_zeta(ell, 1.0 - s));
}

} // namespace pinchlab
