#pragma once

// Gamma-family scalars, the exponentially regularized beta integral, and the
// scaling constant of the nu-calculus operators.

#include <nucalc/quadrature.hpp>

namespace nucalc {

// Parameter bundle (alpha, beta, gamma, c, p) shared by the truncated series
// and the derivative/integral operators.  Valid when alpha, beta, gamma are
// positive, c exceeds gamma, and p is nonnegative; the defaults make the
// scaling constant exactly 1.
struct MLParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double c = 2.0;
    double p = 0.0;

    void validate() const;
};

// Gamma(x).  Poles at 0, -1, -2, ... raise PoleError; results beyond double
// range raise OverflowError.
double gamma_fn(double x);

// log Gamma(x) for x > 0.
double log_gamma(double x);

// Rising factorial (c)_x = Gamma(c+x)/Gamma(c).  Nonnegative-integer x is
// computed as a direct product (valid for any real c, including the
// zero-crossing cases); otherwise c and c+x must be positive.
double pochhammer(double c, double x);

// Euler beta via the gamma function; z, y > 0.
double beta_fn(double z, double y);

// B_p(z, y) = integral over (0,1) of u^(z-1) (1-u)^(y-1) exp(-p/(u(1-u))).
// For p = 0 this is the Euler integral itself, computed by quadrature after a
// substitution that absorbs the endpoint power weights; it is NOT delegated
// to beta_fn, so the two routes stay independent checks of one another.
double extended_beta(double z, double y, double p,
                     const QuadratureControl& ctl = {});
QuadResult extended_beta_full(double z, double y, double p,
                              const QuadratureControl& ctl = {});

// The scaling constant
//   C = Gamma(beta) * B_p(gamma+1, c-gamma) * Gamma(c+1)
//       / (Gamma(gamma) * Gamma(c-gamma) * Gamma(alpha+beta)).
// Always positive; equals 1 at the default parameter set, and
// gamma*Gamma(beta)/Gamma(alpha+beta) whenever p = 0.
double nu_constant(const MLParams& params, const QuadratureControl& ctl = {});

}  // namespace nucalc
