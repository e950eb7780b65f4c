#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>

#include "pinchlab/error.hpp"

namespace pinchlab {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Principal branch of log Gamma(z). Throws ErrorKind::Pole at z in -N_0.
cplx log_gamma(cplx z);

/// Gamma(z) = exp(log_gamma(z)).
cplx gamma(cplx z);

/// Entire function 1/Gamma(z), exactly zero at the poles of Gamma.
cplx rgamma(cplx z);

/// psi(z) = Gamma'(z)/Gamma(z). Throws ErrorKind::Pole at z in -N_0.
cplx digamma(cplx z);

/// log(1 + z) and e^z - 1 without cancellation for small |z|.
cplx log1p(cplx z);
cplx expm1(cplx z);

struct SeriesOptions {
    double tolerance = 1e-16;
    std::int64_t max_terms = 200000;
};

/// Gauss hypergeometric function 2F1(a,b;c;z).
///
/// Raw series for |z| <= 1/2, Pfaff transformation z -> z/(z-1) when that
/// shrinks the argument (in particular on the negative real axis), raw series
/// for the remaining points of the open unit disc. Other z are a domain error.
cplx hyp2f1(cplx a, cplx b, cplx c, cplx z, const SeriesOptions& opts = {});

/// d/dz 2F1(a,b;c;z) = (ab/c) 2F1(a+1,b+1;c+1;z).
cplx hyp2f1_derivative(cplx a, cplx b, cplx c, cplx z, const SeriesOptions& opts = {});

/// Euler dilogarithm Li_2(z) for Re z <= 1 (principal branch).
cplx dilog(cplx z);

// ---------------------------------------------------------------------------
// Quadrature

enum class TailPolicy {
    /// map [A, inf) onto (0, 1] by x = A + (1 - t) / t
    Map,
    /// truncate at B chosen from a caller supplied tail bound; the bound is
    /// added to the reported error
    Truncate,
};

struct QuadratureSpec {
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-13;
    int max_subdivisions = 4000;
    TailPolicy semi_infinite_cutoff_policy = TailPolicy::Map;
    bool throw_on_failure = true;
};

/// Integration range. Endpoints may be infinite. A positive exponent alpha
/// declares an integrable endpoint singularity of type |x - x0|^(-alpha),
/// alpha < 1. tail_bound(B) must bound the integral of |f| over
/// [B, inf) (resp. (-inf, -B]) when the Truncate policy is used.
struct IntegrationRange {
    double lower = 0.0;
    double upper = 1.0;
    double lower_singularity = 0.0;
    double upper_singularity = 0.0;
    std::function<double(double)> tail_bound;
};

struct QuadratureResult {
    cplx value{};
    double error = 0.0;
    std::int64_t evaluations = 0;
    bool converged = true;
};

using Integrand = std::function<cplx(double)>;

QuadratureResult integrate(const Integrand& f, const IntegrationRange& range,
                           const QuadratureSpec& spec = {});

QuadratureResult integrate(const Integrand& f, double lower, double upper,
                           const QuadratureSpec& spec = {});

enum class FourierKind { Cosine, Sine };

/// Integral of f(x) cos(omega x) or f(x) sin(omega x) over [lower, inf) for
/// f decaying monotonically in modulus. Integrates whole half periods and
/// accelerates the alternating partial sums with the epsilon algorithm.
QuadratureResult integrate_fourier(const Integrand& f, double omega, FourierKind kind,
                                   double lower, const QuadratureSpec& spec = {});

} // namespace pinchlab
