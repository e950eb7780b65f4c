#pragma once

#include <cstdint>

#include "pinchlab/hyperbolic.hpp"

namespace pinchlab {

enum class KernelMethod {
    Series,
    Quadrature,
    /// series for 4/(4+t) <= 0.9, else the logarithmic expansion about t = 0
    Auto,
};

/// Resolvent point-pair kernel k_s(t), t = 4 sinh^2(d/2) > 0, Re s > 1/2.
cplx point_pair_k(cplx s, double t, KernelMethod method = KernelMethod::Auto, double tol = 1e-14);

/// M with |k_s(t)| <= M t^{-Re s} for all t > 0.
double point_pair_bound(cplx s);

struct KernelSum {
    cplx value{};
    /// certified bound on the omitted terms |n| > terms
    double tail_bound = 0.0;
    std::int64_t terms = 0;
};

/// Cylinder kernel sum_n k_s(sigma_l(p1, gamma^n p2)) with gamma: x -> x + 1.
KernelSum cylinder_kernel_detail(double ell, cplx s, const CylinderPoint& p1, const CylinderPoint& p2,
                                 double tol = 1e-12);
cplx cylinder_kernel(double ell, cplx s, const CylinderPoint& p1, const CylinderPoint& p2, double tol = 1e-12);

/// Bound function g_l(a1, a2, r) (g_0 for ell = 0).
double g_bound(double ell, double a1, double a2, double r);

/// h_l(z1, z2) = sum_m (1 + sigma_l(z1, gamma^m z2))^{-r}.
double hs_sum(double ell, const CylinderPoint& p1, const CylinderPoint& p2, double r, double tol = 1e-13);

/// Right-hand side of the Hilbert-Schmidt inequality for int_0^1 int_0^1 |h_l|^2.
double hs_bound(double ell, double a1, double a2, double r);

struct RemainderResult {
    cplx value{};
    double error = 0.0;
    /// bound on the omitted n > terms
    double n_tail_bound = 0.0;
    std::int64_t terms = 0;
};

/// int_A^inf sum_{n != 0} k_s(sigma_l((0,a),(n,a))) da.
RemainderResult remainder_integral_detail(double ell, cplx s, double A, double tol = 1e-9);
cplx remainder_integral(double ell, cplx s, double A, double tol = 1e-9);

/// zeta(2 Re s)/(Re s - 1/2) B^{1 - 2 Re s}: bound on the a-tail beyond B of the
/// remainder integrand, in units of point_pair_bound(s).
double remainder_a_tail_estimate(cplx s, double B);

/// sigma_l((0,a),(n,a)) = c_n (l^2 + a^2), c_n = 4 sinh^2(n l/2)/l^2 (n^2 for l = 0).
double displacement_factor(double ell, int n);

} // namespace pinchlab
