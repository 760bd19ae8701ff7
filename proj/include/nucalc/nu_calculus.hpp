#pragma once

// The truncated fractional derivative and its inverse integral.
//
// For differentiable g and 0 < mu <= 1 the derivative operator is
//   V(g)(t) = C * t^(1-mu) * g'(t)
// where C is nu_constant(params); the limit form reproduces it as
//   lim_{eps->0} [g(t * S_i(eps * t^(-mu))) - g(t)] / eps
// with S_i the truncated series of mittag_leffler.hpp.  The integral is the
// weighted antiderivative
//   I(g)(t) = C^(-1) * integral_a^t g(x) x^(mu-1) dx,
// evaluated after the substitution x = s^(1/mu), which removes the weight
// exactly and with it the endpoint singularity at a = 0.

#include <nucalc/expr.hpp>
#include <nucalc/mittag_leffler.hpp>

#include <functional>
#include <utility>
#include <vector>

namespace nucalc {

// Epsilon ladder for the limit-form derivative.  Values must be positive and
// strictly decreasing; with extrapolate=true the result is the two-point
// Richardson extrapolant of the last two estimates (the error model is
// first order in eps).
struct EpsilonSchedule {
    std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    bool extrapolate = true;

    void validate() const;
};

struct DerivResult {
    double value = 0.0;
    std::vector<std::pair<double, double>> per_eps;  // (eps, raw quotient)
    double observed_order = 0.0;  // log-log slope of |estimate - limit|; NaN if no signal
};

// Chain form V(g)(t) = C t^(1-mu) g'(t); requires t > 0 and 0 < mu <= 1.
double deriv_chain(const FnHandle& f, double t, double mu, const MLParams& params = {},
                   const QuadratureControl& qctl = {});

// Limit form via the truncated series argument.  Only the p = 0 regime makes
// the limit reproduce the chain form (the truncated series' own denominator
// is p-free, so for p > 0 the linear coefficient is a different constant);
// p > 0 raises UnsupportedRegime.  The truncation index i must be >= 1 since
// the i = 0 series has no linear term to drive the shift.
DerivResult deriv_limit(const FnHandle& f, double t, double mu, int i = 1,
                        const MLParams& params = {}, const EpsilonSchedule& sched = {},
                        const QuadratureControl& qctl = {});

// nth-order form: for mu in (n, n+1] the limit quotient runs on the nth
// derivative of f and converges to C t^(n+1-mu) f^(n+1)(t).  The first
// derivative is exact (dual numbers); higher ones come from nested central
// differences, so accuracy degrades for n >= 2.
DerivResult deriv_n(const FnHandle& f, double t, double mu, int n,
                    const MLParams& params = {}, const EpsilonSchedule& sched = {},
                    const QuadratureControl& qctl = {});

// Weighted integral over [a, t], a >= 0.  Any mu > 0 is accepted (the weight
// stays integrable), which the two-order composition identity relies on.
double integral(const FnHandle& f, double a, double t, double mu, const MLParams& params = {},
                const QuadratureControl& qctl = {});
QuadResult integral_full(const FnHandle& f, double a, double t, double mu,
                         const MLParams& params = {}, const QuadratureControl& qctl = {});

// Same operator for an arbitrary callable (used to nest integrals and to
// integrate series evaluations without routing them through the parser).
QuadResult integral_fn(const std::function<double(double)>& f, double a, double t, double mu,
                       const MLParams& params = {}, const QuadratureControl& qctl = {});

// Two successive derivatives of orders eta then mu, evaluated in closed form:
//   V_mu(V_eta(g))(t) = C^2 [ (1-eta) t^(1-mu-eta) g'(t) + t^(2-mu-eta) g''(t) ].
// g'' comes from a central difference of the exact first derivative.
double compose_deriv(const FnHandle& f, double t, double mu, double eta,
                     const MLParams& params = {}, const QuadratureControl& qctl = {});

// Closed-form derivative table.  `a` is the rate/exponent where the kind
// uses one (ignored by the mu-power and eigenfunction kinds, whose argument
// is t^mu/mu).
enum class ClosedFormKind {
    exp_at,            // V(e^(a t))        = C t^(1-mu) a e^(a t)
    sin_at,            // V(sin(a t))       = C t^(1-mu) a cos(a t)
    cos_at,            // V(cos(a t))       = -C t^(1-mu) a sin(a t)
    power_a,           // V(t^a)            = C a t^(a-mu)
    power_mu_over_mu,  // V(t^mu / mu)      = C
    eigen_exp,         // V(e^(t^mu/mu))    = C e^(t^mu/mu)
    eigen_sin,         // V(sin(t^mu/mu))   = C cos(t^mu/mu)
    eigen_cos          // V(cos(t^mu/mu))   = -C sin(t^mu/mu)
};

double closed_form_deriv(ClosedFormKind kind, double a, double t, double mu,
                         const MLParams& params = {}, const QuadratureControl& qctl = {});

// Returns the generating expression the closed form differentiates, rendered
// in the expression language (for cross-checking against deriv_chain).
std::string closed_form_expression(ClosedFormKind kind, double a, double mu);

// Derivative of the 2-parameter Mittag-Leffler function E_{lambda,delta}:
//   V(E)(t) = C t^(1-mu) E^2_{lambda, lambda+delta}(t).
double deriv_ml2(double lambda, double delta, double t, double mu, const MLParams& params = {},
                 const SeriesControl& sctl = {}, const QuadratureControl& qctl = {});

// nth-order variant: C t^(n+1-mu) Gamma(n+2) E^{n+2}_{lambda, delta+lambda(n+1)}(t)
// for mu in (n, n+1].
double deriv_ml2_n(double lambda, double delta, double t, double mu, int n,
                   const MLParams& params = {}, const SeriesControl& sctl = {},
                   const QuadratureControl& qctl = {});

// Termwise integral of E_{lambda,delta} over [a, t]:
//   C^(-1) sum_k (t^(k+mu) - a^(k+mu)) / ((k+mu) Gamma(lambda k + delta)).
double integral_ml2(double lambda, double delta, double a, double t, double mu,
                    const MLParams& params = {}, const SeriesControl& sctl = {},
                    const QuadratureControl& qctl = {});

// Integral of the reflected power kernel g(x) = (t-x)^lambda from 0 to t:
//   C^(-1) Gamma(lambda+1) Gamma(mu) / Gamma(lambda+1+mu) * t^(lambda+mu),
// the Riemann-Liouville-style closed form; lambda > -1.
double integral_power_kernel(double lambda, double t, double mu, const MLParams& params = {},
                             const QuadratureControl& qctl = {});

}  // namespace nucalc
