#pragma once

// Mittag-Leffler family: the three-parameter series, its beta-regularized
// extensions, and the truncated sum that drives the limit definition of the
// fractional derivative.

#include <nucalc/special_functions.hpp>

#include <vector>

namespace nucalc {

struct SeriesControl {
    double rel_tol = 1e-12;
    int max_terms = 1000;
    int tail_streak = 3;  // consecutive negligible terms required before stopping

    void validate() const;
};

struct SeriesResult {
    double value = 0.0;
    int terms_used = 0;
    double tail_estimate = 0.0;  // geometric bound on the dropped remainder
};

// Three-parameter (Prabhakar) function
//   E^rho_{lambda,delta}(z) = sum_n (rho)_n z^n / (Gamma(lambda n + delta) n!).
// Terms are assembled in log space and accumulated in extended precision so
// alternating sums near cancellation keep ~1e-14 relative accuracy.
SeriesResult ml3(double rho, double lambda, double delta, double z,
                 const SeriesControl& ctl = {});

// Classical one-parameter function E_alpha(z) = E^1_{alpha,1}(z).
SeriesResult ml1(double alpha, double z, const SeriesControl& ctl = {});

// Beta-regularized extension: coefficients carry
//   B_p(nu + n, c - nu) (c)_n / B(nu, c - nu)
// and reduce to (nu)_n at p = 0, recovering ml3(nu, theta, vartheta, z).
SeriesResult ml_extended(double theta, double vartheta, double nu, double c, double p, double z,
                         const SeriesControl& ctl = {}, const QuadratureControl& qctl = {});

// Step-q generalization: coefficients carry
//   B_p(vartheta + n q, c - vartheta) (c)_{n q} / B(vartheta, c - vartheta)
// over Gamma(mu n + delta) n!.  At p = 0 the beta ratio collapses with
// (c)_{nq} to (vartheta)_{nq}, so q = 1 recovers ml_extended/ml3 termwise.
// For q > mu + 1 (and on the boundary with |z| past the radius) the series
// diverges and the evaluation reports ConvergenceError.
SeriesResult ml_extended_gen(double mu, double delta, double vartheta, double q, double c,
                             double p, double z, const SeriesControl& ctl = {},
                             const QuadratureControl& qctl = {});

// Coefficients a_0..a_i of the truncated series
//   sum_{n<=i} B_p(gamma+n, c-gamma) (c)_n z^n / (B(gamma, c-gamma) Gamma(alpha n + beta) n!).
// The denominator beta stays the plain Euler beta for every p.  Computing the
// vector once lets a caller sweep z (the limit-form derivative evaluates the
// same polynomial at a shrinking argument).
std::vector<double> truncated_coefficients(int i, const MLParams& params,
                                           const QuadratureControl& qctl = {});

// Truncated series value at z (finite polynomial, i+1 terms).
double ml_truncated(int i, const MLParams& params, double z,
                    const QuadratureControl& qctl = {});

// S_i(z) = Gamma(beta) * truncated series; expands as 1 + C z + O(z^2) at the
// canonical p = 0 regime, which is what makes the limit-form derivative tend
// to the chain form.
double s_truncated(int i, const MLParams& params, double z,
                   const QuadratureControl& qctl = {});

}  // namespace nucalc
