#include "pinchlab/special_functions.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace pinchlab {

namespace {

constexpr double log_2pi_half = 0.91893853320467274178032973640561764; // log(2 pi) / 2
constexpr double log_pi = 1.14472988584940017414342735135305871;

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// Stirling series for Re z >= 15.
cplx log_gamma_stirling(cplx z) {
    static constexpr std::array<double, 8> coef = {
        1.0 / 12.0,         -1.0 / 360.0,   1.0 / 1260.0, -1.0 / 1680.0,
        1.0 / 1188.0,       -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0,
    };
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx corr = 0.0;
    cplx p = inv;
    for (double c : coef) {
        corr += c * p;
        p *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + log_2pi_half + corr;
}

cplx log_gamma_right(cplx z) {
    // z with Re z >= 1/2: shift into the Stirling region
    cplx shift = 0.0;
    while (z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    return log_gamma_stirling(z) - shift;
}

// continuous branch of log sin(pi z) on the closed upper half-plane
cplx log_sin_pi_upper(cplx z) {
    const cplx i(0.0, 1.0);
    const cplx e = std::exp(2.0 * pi * i * z);
    return -i * pi * z + std::log(1.0 - e) - std::log(2.0) + i * (pi / 2.0);
}

cplx hyp_series(cplx a, cplx b, cplx c, cplx z, const SeriesOptions& opts) {
    cplx sum = 1.0;
    cplx term = 1.0;
    int small = 0;
    for (std::int64_t n = 0; n < opts.max_terms; ++n) {
        const double dn = static_cast<double>(n);
        const cplx ratio = (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0));
        term *= ratio * z;
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) <= opts.tolerance * std::abs(sum) && std::abs(ratio * z) < 1.0) {
            if (++small >= 2) return sum;
        } else {
            small = 0;
        }
    }
    std::ostringstream msg;
    msg << "hyp2f1: series did not converge within " << opts.max_terms << " terms at z=" << z;
    throw Error(ErrorKind::Convergence, msg.str());
}

} // namespace

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Pole: return "pole";
    case ErrorKind::PoleProximity: return "pole-proximity";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Convergence: return "non-convergence";
    case ErrorKind::Tolerance: return "tolerance-not-met";
    case ErrorKind::InvalidInterval: return "invalid-interval";
    case ErrorKind::Budget: return "budget-exceeded";
    case ErrorKind::Graph: return "graph-invalid";
    case ErrorKind::Degeneracy: return "numerical-degeneracy";
    case ErrorKind::SingularMatrix: return "singular-matrix";
    case ErrorKind::DecayHypothesis: return "decay-hypothesis";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

cplx log_gamma(cplx z) {
    if (is_nonpositive_integer(z)) {
        std::ostringstream msg;
        msg << "log_gamma: pole at z=" << z.real();
        throw Error(ErrorKind::Pole, msg.str());
    }
    if (z.real() >= 0.5) return log_gamma_right(z);
    if (z.imag() < 0.0) return std::conj(log_gamma(std::conj(z)));
    // reflection, upper half-plane branch
    return log_pi - log_sin_pi_upper(z) - log_gamma_right(1.0 - z);
}

cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

cplx rgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

cplx digamma(cplx z) {
    if (is_nonpositive_integer(z)) {
        std::ostringstream msg;
        msg << "digamma: pole at z=" << z.real();
        throw Error(ErrorKind::Pole, msg.str());
    }
    if (z.real() < 0.5) return digamma(1.0 - z) - pi / std::tan(pi * z);
    static constexpr std::array<double, 7> coef = {
        1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0,
    };
    cplx shift = 0.0;
    while (z.real() < 15.0) {
        shift += 1.0 / z;
        z += 1.0;
    }
    const cplx inv2 = 1.0 / (z * z);
    cplx corr = 0.0;
    cplx p = inv2;
    for (double c : coef) {
        corr += c * p;
        p *= inv2;
    }
    return std::log(z) - 0.5 / z - corr - shift;
}

cplx log1p(cplx z) {
    if (std::abs(z) > 0.5) return std::log(1.0 + z);
    const double x = z.real(), y = z.imag();
    return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
}

cplx expm1(cplx z) {
    if (std::abs(z) > 0.5) return std::exp(z) - 1.0;
    const double x = z.real(), y = z.imag();
    const double sh = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * sh * sh, std::exp(x) * std::sin(y)};
}

cplx hyp2f1(cplx a, cplx b, cplx c, cplx z, const SeriesOptions& opts) {
    if (is_nonpositive_integer(c)) {
        std::ostringstream msg;
        msg << "hyp2f1: parameter pole c=" << c.real();
        throw Error(ErrorKind::Pole, msg.str());
    }
    if (z == 0.0) return 1.0;
    const double az = std::abs(z);
    if (az <= 0.5) return hyp_series(a, b, c, z, opts);
    if (z.real() < 0.5) {
        const cplx w = z / (z - 1.0);
        if (std::abs(w) < az || az >= 1.0) {
            // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1))
            return std::exp(-a * std::log(1.0 - z)) * hyp_series(a, c - b, c, w, opts);
        }
    }
    if (az < 1.0) return hyp_series(a, b, c, z, opts);
    std::ostringstream msg;
    msg << "hyp2f1: argument z=" << z << " outside the supported region";
    throw Error(ErrorKind::Domain, msg.str());
}

cplx hyp2f1_derivative(cplx a, cplx b, cplx c, cplx z, const SeriesOptions& opts) {
    if (is_nonpositive_integer(c)) {
        std::ostringstream msg;
        msg << "hyp2f1_derivative: parameter pole c=" << c.real();
        throw Error(ErrorKind::Pole, msg.str());
    }
    const cplx ab = a * b;
    if (ab == 0.0) return 0.0;
    return ab / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z, opts);
}

namespace {

// Li_2 via the Bernoulli series in u = -log(1 - z), valid for |u| < 2 pi.
cplx dilog_bernoulli(cplx z) {
    static constexpr std::array<double, 15> b2k = {
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
        43867.0 / 798.0,
        -174611.0 / 330.0,
        854513.0 / 138.0,
        -236364091.0 / 2730.0,
        8553103.0 / 6.0,
        -23749461029.0 / 870.0,
        8615841276005.0 / 14322.0,
    };
    const cplx u = -std::log(1.0 - z);
    const cplx u2 = u * u;
    cplx sum = u - 0.25 * u2;
    cplx p = u; // u^{2k+1} / (2k+1)!
    for (std::size_t k = 1; k <= b2k.size(); ++k) {
        const double n = static_cast<double>(2 * k);
        p *= u2 / (n * (n + 1.0));
        const cplx term = b2k[k - 1] * p;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

} // namespace

cplx dilog(cplx z) {
    if (z.real() > 1.0) {
        std::ostringstream msg;
        msg << "dilog: z=" << z << " outside the principal region Re z <= 1";
        throw Error(ErrorKind::Domain, msg.str());
    }
    if (z == 0.0) return 0.0;
    if (z == 1.0) return pi * pi / 6.0;
    if (std::abs(z) > 1.0) {
        // inversion
        const cplx l = std::log(-z);
        return -pi * pi / 6.0 - 0.5 * l * l - dilog(1.0 / z);
    }
    if (z.real() > 0.5) {
        // reflection
        return pi * pi / 6.0 - std::log(z) * std::log(1.0 - z) - dilog_bernoulli(1.0 - z);
    }
    return dilog_bernoulli(z);
}

} // namespace pinchlab
