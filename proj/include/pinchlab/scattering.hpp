#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pinchlab/special_functions.hpp"

namespace pinchlab {

using CMatrix = Eigen::MatrixXcd;

/// Distance below which s counts as sitting on a pole of a meromorphic family.
inline constexpr double pole_guard = 1e-6;

struct ModeValue {
    cplx value{};
    cplx derivative{};
};

/// Fourier mode h^n(l,s)(a) of the half-cylinder a < 0 and its a-derivative.
/// n = 0 gives h(l,s). Uses the power series in l^2/(l^2+a^2) away from the
/// geodesic and the connection formula about a = 0 close to it.
ModeValue mode(double ell, cplx s, int n, double a);
cplx mode_function(double ell, cplx s, int n, double a);
cplx mode_derivative(double ell, cplx s, int n, double a);

/// Continuation of h(l,s) from a < 0 to all real a as a smooth solution of
/// the constant-mode equation (l > 0).
ModeValue mode_continued(double ell, cplx s, double a);

/// Two-term representation of h(l,s) about the closed geodesic, valid for
/// every real a: even part minus odd part.
cplx eigen_center(double ell, cplx s, double a);

/// det [h(s1) h(s2); h'(s1) h'(s2)] at a < 0.
cplx wronskian(double ell, cplx s1, cplx s2, double a);

struct Connection {
    cplx alpha{};
    cplx beta{};
};

/// alpha = 1/cos(pi s), beta = 4^s Gamma(1/2+s)^2 / ((2s-1) Gamma(s)^2).
Connection connection_coefficients(double ell, cplx s);

/// [alpha h(l,s) + l^{1-2s} beta h(l,1-s)](-a), the continuation of h(l,s) to a > 0.
cplx eigen_right(double ell, cplx s, double a);

struct ConstantModeProfile {
    std::vector<double> a;
    std::vector<cplx> F0;
    std::vector<cplx> dF0;
};

struct CDPair {
    cplx D{};
    cplx C{};
};

/// (D, C) with F0 = D h(l,s) + C h(l,1-s), read off at the grid node a_eval.
CDPair extract_CD(const ConstantModeProfile& profile, double ell, cplx s, double a_eval);
/// Same, from a single value/derivative pair at a.
CDPair extract_CD(cplx F0, cplx dF0, double ell, cplx s, double a);

/// Sigma(s): 1/cos(pi s) on the diagonal, 1 at (i, iota(i)) for i != iota(i).
CMatrix sigma_matrix(const std::vector<int>& iota, cplx s);
/// Diagonal l_j^{2s-1}, zero where l_j = 0.
CMatrix lambda_power(const std::vector<double>& ell, cplx s);
/// D = 1 + (2s-1) 4^{-s} Gamma(s)^2 / Gamma(1/2+s)^2 C Sigma(s) lambda^{2s-1}.
CMatrix d_from_c(const CMatrix& C, const std::vector<int>& iota, const std::vector<double>& ell, cplx s);
/// (2s-1) 4^{-s} Gamma(s)^2 / Gamma(1/2+s)^2.
cplx d_factor(cplx s);

struct ScatteringPair {
    std::vector<std::string> ends;
    std::vector<int> iota;
    std::vector<double> ell;
    cplx s{};
    CMatrix C;
    CMatrix D;
};

/// Smooth cut-off: 0 for a <= -2 eps, 1 for a >= -eps, quintic C^2 joint.
struct Cutoff {
    double eps = 0.0;
    double value(double a) const;
    double d1(double a) const;
    double d2(double a) const;
};

/// eps = 0.3 l / (2 sinh(l/2)), three tenths of the collar half-width.
double default_cutoff_width(double ell);

struct CylinderOptions {
    /// 0 selects default_cutoff_width
    double eps = 0.0;
    double tol = 1e-11;
};

/// Constant mode of the approximate Eisenstein function of the end "-" of the
/// standalone cylinder, E = chi h - R(s)[Delta, chi] h, with R(s) realised by
/// the constant-mode Green's function.
class CylinderEisenstein {
public:
    CylinderEisenstein(double ell, cplx s, const CylinderOptions& opts = {});

    /// E and dE/da at any real a != 0 (jump at the geodesic a = 0)
    ModeValue operator()(double a) const;

    double ell() const { return ell_; }
    cplx s() const { return s_; }
    const Cutoff& cutoff() const { return chi_; }

    /// Green's function weights K_- = int u_- f / (pW), K_+ = int u_+ f / (pW)
    cplx k_minus() const { return k_minus_; }
    cplx k_plus() const { return k_plus_; }

    /// int_{-inf}^{-A} E(s) E'(s') da for A in (0, eps)
    cplx product_integral(const CylinderEisenstein& other, double A) const;

private:
    cplx source(double b) const;

    double ell_;
    cplx s_;
    Cutoff chi_;
    double tol_;
    QuadratureSpec spec_;
    cplx pw_{};
    cplx k_minus_{};
    cplx k_plus_{};
};

/// 2x2 (C, D) of the standalone cylinder with ends (-, +) exchanged by (x,a) -> (-x,-a).
ScatteringPair cylinder_scattering(double ell, cplx s, const CylinderOptions& opts = {});

/// |LHS - RHS| of the Maass-Selberg relation for the cylinder ends i, j.
struct MaassSelbergCheck {
    cplx lhs{};
    cplx rhs{};
    double residual = 0.0;
};
MaassSelbergCheck maass_selberg_residual(double ell, cplx s, cplx sp, double A, int i, int j,
                                         const CylinderOptions& opts = {});

/// Right-hand side of the Maass-Selberg relation from given matrices.
cplx maass_selberg_rhs(const CMatrix& C, const CMatrix& D, const CMatrix& Cp, const CMatrix& Dp,
                       const std::vector<double>& ell, cplx s, cplx sp, double A, int i, int j);

/// C' = D^{-1} C; SingularMatrix when D is numerically singular.
CMatrix cprime(const CMatrix& C, const CMatrix& D);

struct IdentityReport {
    double cprime_symmetry = 0.0;
    double c_symmetry = 0.0;
    /// || C D^t - D C^t ||
    double cd_commutation = 0.0;
    /// || D - D^t - d_factor [C, Sigma lambda^{2s-1}] ||
    double d_antisymmetric = 0.0;
    /// finite-area identities, informational for infinite area
    std::optional<double> functional_dd_cc;
    std::optional<double> cprime_functional;
    std::optional<double> unitarity;
    bool finite_area = false;
};

/// Residuals of the scattering identities at s, and at 1 - s when given.
IdentityReport identity_residuals(const ScatteringPair& at_s, const ScatteringPair* at_one_minus_s = nullptr,
                                  bool finite_area = false);

/// Pinching asymptote lambda^{1-2s} (1-2s) 4^{-(1-s)} Gamma(1-s)^2 / Gamma(3/2-s)^2 Sigma(1-s), Re s < 1/2.
CMatrix lhp_c_asymptote(const std::vector<double>& ell, const std::vector<int>& iota, cplx s);

} // namespace pinchlab
