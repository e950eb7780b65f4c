#pragma once

#include "pinchlab/special_functions.hpp"
#include "pinchlab/surface.hpp"

namespace pinchlab {

struct ZetaResult {
    cplx value;
    /// principal sum of log factors (may differ from log(value) by 2 pi i k)
    cplx log_value;
    /// bound on the truncated tail of log_value
    double error = 0.0;
    /// number of k-factors used
    int terms = 0;
};

/// Z_l(s) = prod_{k>=0} (1 - e^{-(s+k) l})^2, accumulated in log space.
ZetaResult zeta_factor_detail(double ell, cplx s, double tol = 1e-16);
cplx zeta_factor(double ell, cplx s, double tol = 1e-16);

/// Product of zeta_factor over the primitive entries of a spectrum (with multiplicity).
ZetaResult zeta_truncated_detail(const LengthSpectrum& spectrum, cplx s, double tol = 1e-16);
cplx zeta_truncated(const LengthSpectrum& spectrum, cplx s, double tol = 1e-16);

/// log(Gamma(w)^2 Z_l(w)); entire in w, the Gamma poles cancel against zeros of Z_l.
cplx log_gamma_sq_zeta(double ell, cplx w, double tol = 1e-16);

/// Gamma(s)^2 Z_l(s) e^{pi^2/(3 l)} l^{2s-1}.
cplx pinch_asymptotic(double ell, cplx s);

/// Exact split of log Z_l(s) (Re s > 0) into the three parts of the asymptotic proof.
struct PinchSplit {
    cplx log_zeta;
    /// log(1 - e^{-s l})
    cplx log_term;
    /// -2 l^{-1} Li2(e^{-s l})
    cplx dilog_term;
    /// the same after the dilogarithm reflection
    cplx dilog_reflected;
    /// -2 sum_n e^{-s n l}/n [(e^{n l}-1)^{-1} - 1/(n l) + 1/2]
    cplx binet_sum;
    /// its l -> 0 limit -2 log Gamma(s) + (2s-1) log s - 2s + log 2 pi
    cplx binet_limit;
};
PinchSplit pinch_split(double ell, cplx s, double tol = 1e-17);

struct LogDerivResult {
    /// Z_l'/Z_l from the k-sum
    cplx value;
    /// the same from (2s-1) times the n-sum over both orientations (NaN if Re s <= 1/2)
    cplx n_sum_value;
    int k_terms = 0;
    int n_terms = 0;
    bool converged = true;
};

LogDerivResult log_deriv_factor(double ell, cplx s, double tol = 1e-15);

/// Z_l(s) l^{4s-2} Gamma(s)^2 / (Z_l(1-s) Gamma(1-s)^2).
cplx lhp_reduction_ratio(double ell, cplx s);

} // namespace pinchlab
