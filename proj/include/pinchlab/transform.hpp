#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "pinchlab/special_functions.hpp"
#include "pinchlab/surface.hpp"

namespace pinchlab {

using RealFunction = std::function<cplx(double)>;

/// Piecewise Chebyshev interpolant of a complex function on [lower, upper],
/// identically zero beyond upper. Panels are bisected until the trailing
/// coefficients fall below the absolute tolerance.
class PiecewiseChebyshev {
public:
    PiecewiseChebyshev() = default;

    static PiecewiseChebyshev fit(const RealFunction& f, double lower, double upper, double abs_tol,
                                  int degree = 24, int max_panels = 8192);

    cplx operator()(double x) const;
    cplx derivative(double x) const;
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    std::size_t panels() const { return panels_.size(); }

private:
    struct Panel {
        double a = 0.0, b = 0.0;
        std::vector<cplx> c;
        std::vector<cplx> dc;
    };
    const Panel& locate(double x) const;

    double lower_ = 0.0;
    double upper_ = 0.0;
    std::vector<Panel> panels_;
};

/// Decay hypotheses: h analytic and O((1+|xi|)^{-2-delta}) in a strip,
/// |k(t)| <= C (1+t)^{-1-rho}, |g(u)| <= C e^{-(1/2+rho)|u|}.
struct DecayParameters {
    double delta = 0.5;
    double rho = 0.5;
};

/// A Selberg transform quadruple h <-> g <-> Q <-> k. h and g are even.
struct SelbergTriple {
    RealFunction h;
    RealFunction g;
    RealFunction Q;
    RealFunction dQ;
    RealFunction k;
    DecayParameters decay;
    /// h and g vanish (below the tabulation cut-off) beyond these; inf if not truncated
    double h_support = inf;
    double g_support = inf;
};

/// Difference triple (h_s - h_s0, g_s - g_s0, Q, k_s - k_s0) of the resolvent,
/// h_s(xi) = (1/4 + xi^2 - s(1-s))^{-1}, g_s(u) = e^{-(s-1/2)|u|}/(2s-1).
SelbergTriple resolvent_triple(cplx s, cplx s0);

enum class ChainDirection { KtoH, HtoK };

struct TransformSpec {
    DecayParameters decay;
    /// relative accuracy of the tabulated stages
    double tolerance = 1e-11;
    /// magnitude, relative to the maximum, below which a tail is dropped
    double cutoff = 1e-12;
    /// the input vanishes beyond this point (h_support of a previous chain)
    double input_support = inf;
};

/// Builds the full quadruple from k (KtoH) or from h (HtoK). g is tabulated;
/// in the KtoH direction h is tabulated as well.
SelbergTriple transform_chain(const RealFunction& input, ChainDirection direction, const TransformSpec& spec = {});

/// Q(w) = int_w^inf k(t) (t-w)^{-1/2} dt. tol is relative, abs_tol absolute (0: none).
cplx abel_transform(const RealFunction& k, double w, double tol = 1e-12, double abs_tol = 0.0);

/// k(t) = -(1/pi) int_t^inf Q'(w) (w-t)^{-1/2} dw, written with Q'(w) dw = g'(u) du.
cplx inverse_abel_transform(const RealFunction& dg, double t, double g_support = inf, double tol = 1e-12,
                            double abs_tol = 0.0);

/// int_R g(u) e^{i xi u} du for even g.
cplx even_fourier(const RealFunction& g, double xi, double support = inf, double tol = 1e-12, double abs_tol = 0.0);

/// (1/2 pi) int_R h(xi) e^{-i xi u} dxi for even h.
cplx even_inverse_fourier(const RealFunction& h, double u, double support = inf, double tol = 1e-12,
                          double abs_tol = 0.0);

/// w(u) = e^u + e^{-u} - 2 = 4 sinh^2(u/2).
double u_to_w(double u);
double w_to_u(double w);

/// (1/4 pi) int_R xi (h_s - h_s0)(xi) tanh(pi xi) dxi, by quadrature.
cplx identity_term(cplx s, cplx s0);

/// k_s(0) - k_s0(0) from the term-wise difference of the hypergeometric series of k at t = 0.
cplx identity_term_series(cplx s, cplx s0);

/// lim_{t -> 0} (k_s(t) - k_s0(t)) from point_pair_k.
cplx kernel_difference_at_zero(cplx s, cplx s0);

struct GeometricSideOptions {
    /// |g(u)| <= decay_constant e^{-decay_rate |u|}
    double decay_rate = 0.5;
    double decay_constant = 1.0;
    double tolerance = 1e-14;
    int max_terms = 1000000;
};

struct GeometricSideResult {
    cplx value{};
    double tail_bound = 0.0;
    int terms = 0;
};

/// sum over oriented primitive geodesics c and n >= 1 of l(c) g(n l(c)) / (e^{n l/2} - e^{-n l/2});
/// each unoriented primitive entry counts twice (times its multiplicity).
GeometricSideResult geometric_side(const std::vector<double>& lengths, const RealFunction& g,
                                   const GeometricSideOptions& opts = {});
GeometricSideResult geometric_side(const LengthSpectrum& spectrum, const RealFunction& g,
                                   const GeometricSideOptions& opts = {});

/// Parameters of the cylinder trace check. sign is the orientation sign of
/// the component (+1 for the single component of an elementary cylinder).
struct TraceConfig {
    cplx s{2.0, 0.0};
    cplx s0{3.0, 0.0};
    double A = 1.0;
    int sign = 1;
};

struct TraceCheck {
    cplx lhs{};
    cplx rhs{};
    double residual = 0.0;
    /// pieces of lhs: 2 int_0^A (near) and 2 (R_s(A) - R_s0(A)) (far)
    cplx near_part{};
    cplx far_part{};
    double near_tail_bound = 0.0;
    double far_tail_bound = 0.0;
    double geometric_tail_bound = 0.0;
};

/// lhs = int over the cylinder of sum_{n != 0} (k_s - k_s0)(sigma_l(z, gamma^n z)) da dx,
/// rhs = geometric_side(l, g_s - g_s0).
TraceCheck cylinder_trace_check(double ell, const TraceConfig& config, double tol = 1e-10);

} // namespace pinchlab
