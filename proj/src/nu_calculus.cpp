#include <nucalc/nu_calculus.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nucalc {

namespace {

void require_t_positive(double t) {
    if (!(t > 0.0)) {
        std::ostringstream os;
        os << "derivative requires t > 0, got " << t;
        throw DomainError(os.str());
    }
}

void require_first_order(double mu) {
    if (!(mu > 0.0) || mu > 1.0) {
        std::ostringstream os;
        os << "first-order operator requires mu in (0, 1], got " << mu;
        throw DomainError(os.str());
    }
}

double lgamma_pos(double x) { return log_gamma(x); }

// f^(m): exact for m <= 1, nested central differences above (step scales
// with |x|; each nesting costs ~2 digits, so m >= 3 is qualitative only).
double derivative_of_order(const FnHandle& f, double x, int m) {
    if (m <= 0) return eval(f, x);
    if (m == 1) return eval_d(f, x).derivative;
    const double h = 1e-5 * (1.0 + std::fabs(x));
    return (derivative_of_order(f, x + h, m - 1) - derivative_of_order(f, x - h, m - 1)) /
           (2.0 * h);
}

struct LimitSetup {
    double value_last = 0.0;
    double extrapolant = 0.0;
    std::vector<std::pair<double, double>> per_eps;
    double observed_order = std::numeric_limits<double>::quiet_NaN();
};

// Shared driver for the limit-form quotients: shift(eps) maps eps to the
// perturbed argument, quotient_fn evaluates [g(arg) - g(t)] / eps.
LimitSetup run_limit(const EpsilonSchedule& sched,
                     const std::function<double(double)>& quotient_fn) {
    LimitSetup out;
    out.per_eps.reserve(sched.eps.size());
    for (const double e : sched.eps) {
        const double q = quotient_fn(e);
        if (!std::isfinite(q)) {
            std::ostringstream os;
            os << "limit estimate at eps = " << e << " is not finite";
            throw ConvergenceError(os.str());
        }
        out.per_eps.emplace_back(e, q);
    }
    const std::size_t n = out.per_eps.size();
    out.value_last = out.per_eps.back().second;
    if (n >= 2) {
        // Two-point elimination of the O(eps) error term.
        const double e1 = out.per_eps[n - 2].first, d1 = out.per_eps[n - 2].second;
        const double e2 = out.per_eps[n - 1].first, d2 = out.per_eps[n - 1].second;
        out.extrapolant = (e1 * d2 - e2 * d1) / (e1 - e2);
    } else {
        out.extrapolant = out.value_last;
    }
    // Slope of ln|D(eps) - L| against ln eps, ignoring points already at
    // rounding noise.  Clean first-order convergence shows slope ~= 1.
    const double L = out.extrapolant;
    const double floor_resid = 1e3 * std::numeric_limits<double>::epsilon() *
                               std::max(1.0, std::fabs(L));
    std::vector<std::pair<double, double>> pts;
    for (const auto& [e, d] : out.per_eps) {
        const double r = std::fabs(d - L);
        if (r > floor_resid) pts.emplace_back(std::log(e), std::log(r));
    }
    if (pts.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double m = pts.size();
        const double denom = m * sxx - sx * sx;
        if (denom != 0.0) out.observed_order = (m * sxy - sx * sy) / denom;
    }
    // Divergence guard: refining eps must not make things worse.
    const double first_resid = std::fabs(out.per_eps.front().second - L);
    const double last_resid = std::fabs(out.per_eps.back().second - L);
    if (n >= 3 && last_resid > 10.0 * first_resid + floor_resid) {
        std::ostringstream os;
        os << "limit estimates diverge across the epsilon schedule (residual " << first_resid
           << " -> " << last_resid << ")";
        throw ConvergenceError(os.str());
    }
    return out;
}

}  // namespace

void EpsilonSchedule::validate() const {
    if (eps.empty()) throw ValidationError("epsilon schedule must not be empty");
    double prev = std::numeric_limits<double>::infinity();
    for (const double e : eps) {
        if (!(e > 0.0) || !(e < prev)) {
            std::ostringstream os;
            os << "epsilon schedule must be positive and strictly decreasing, got " << e;
            throw ValidationError(os.str());
        }
        prev = e;
    }
}

double deriv_chain(const FnHandle& f, double t, double mu, const MLParams& params,
                   const QuadratureControl& qctl) {
    require_t_positive(t);
    require_first_order(mu);
    const double C = nu_constant(params, qctl);
    return C * std::pow(t, 1.0 - mu) * eval_d(f, t).derivative;
}

DerivResult deriv_limit(const FnHandle& f, double t, double mu, int i, const MLParams& params,
                        const EpsilonSchedule& sched, const QuadratureControl& qctl) {
    require_t_positive(t);
    require_first_order(mu);
    params.validate();
    sched.validate();
    if (i < 1) {
        std::ostringstream os;
        os << "limit form needs truncation index i >= 1 (the i = 0 series is constant and "
              "produces no argument shift), got "
           << i;
        throw ValidationError(os.str());
    }
    if (params.p > 0.0) {
        throw UnsupportedRegime(
            "limit form is only consistent with the chain form at p = 0; the truncated "
            "series' fixed denominator makes its linear coefficient differ from the scaling "
            "constant when p > 0");
    }
    // One coefficient pass; every epsilon reuses the same polynomial.
    const std::vector<double> coeff = truncated_coefficients(i, params, qctl);
    const double gb = gamma_fn(params.beta);
    const double tpow = std::pow(t, -mu);
    const double f_at_t = eval(f, t);
    auto quotient = [&](double e) {
        const double z = e * tpow;
        long double s = 0.0L;
        for (auto it = coeff.rbegin(); it != coeff.rend(); ++it)
            s = s * static_cast<long double>(z) + static_cast<long double>(*it);
        const double arg = t * gb * static_cast<double>(s);
        return (eval(f, arg) - f_at_t) / e;
    };
    const LimitSetup lim = run_limit(sched, quotient);
    DerivResult r;
    r.per_eps = lim.per_eps;
    r.observed_order = lim.observed_order;
    r.value = sched.extrapolate ? lim.extrapolant : lim.value_last;
    return r;
}

DerivResult deriv_n(const FnHandle& f, double t, double mu, int n, const MLParams& params,
                    const EpsilonSchedule& sched, const QuadratureControl& qctl) {
    require_t_positive(t);
    if (n < 0) {
        std::ostringstream os;
        os << "derivative order count must be nonnegative, got " << n;
        throw ValidationError(os.str());
    }
    if (!(mu > n) || mu > n + 1.0) {
        std::ostringstream os;
        os << "nth-order operator requires mu in (n, n+1], got mu = " << mu << " with n = " << n;
        throw DomainError(os.str());
    }
    params.validate();
    sched.validate();
    if (params.p > 0.0) {
        throw UnsupportedRegime("limit form is only consistent with the chain form at p = 0");
    }
    const std::vector<double> coeff = truncated_coefficients(1, params, qctl);
    const double gb = gamma_fn(params.beta);
    const double tpow = std::pow(t, n - mu);
    const double gn_at_t = derivative_of_order(f, t, n);
    auto quotient = [&](double e) {
        const double z = e * tpow;
        const double s = gb * (coeff[0] + coeff[1] * z);
        return (derivative_of_order(f, t * s, n) - gn_at_t) / e;
    };
    const LimitSetup lim = run_limit(sched, quotient);
    DerivResult r;
    r.per_eps = lim.per_eps;
    r.observed_order = lim.observed_order;
    r.value = sched.extrapolate ? lim.extrapolant : lim.value_last;
    return r;
}

QuadResult integral_fn(const std::function<double(double)>& f, double a, double t, double mu,
                       const MLParams& params, const QuadratureControl& qctl) {
    if (!(a >= 0.0)) {
        std::ostringstream os;
        os << "integral lower limit must be nonnegative, got " << a;
        throw DomainError(os.str());
    }
    if (!(t >= a)) {
        std::ostringstream os;
        os << "integral needs t >= a, got t = " << t << ", a = " << a;
        throw DomainError(os.str());
    }
    if (!(mu > 0.0)) {
        std::ostringstream os;
        os << "integral requires mu > 0, got " << mu;
        throw DomainError(os.str());
    }
    const double C = nu_constant(params, qctl);
    if (t == a) return {0.0, 0.0, 0};
    // x = s^(1/mu) turns g(x) x^(mu-1) dx into g(s^(1/mu)) ds / mu; the
    // quadrature never touches the endpoints, so g is only sampled on (a, t).
    const double inv_mu = 1.0 / mu;
    const QuadResult q = integrate_adaptive(
        [&](double s) { return f(std::pow(s, inv_mu)); }, std::pow(a, mu), std::pow(t, mu), qctl);
    QuadResult out;
    const double scale = inv_mu / C;
    out.value = scale * q.value;
    out.error_estimate = std::fabs(scale) * q.error_estimate;
    out.levels_used = q.levels_used;
    return out;
}

QuadResult integral_full(const FnHandle& f, double a, double t, double mu,
                         const MLParams& params, const QuadratureControl& qctl) {
    return integral_fn([&](double x) { return eval(f, x); }, a, t, mu, params, qctl);
}

double integral(const FnHandle& f, double a, double t, double mu, const MLParams& params,
                const QuadratureControl& qctl) {
    return integral_full(f, a, t, mu, params, qctl).value;
}

double compose_deriv(const FnHandle& f, double t, double mu, double eta, const MLParams& params,
                     const QuadratureControl& qctl) {
    require_t_positive(t);
    require_first_order(mu);
    if (!(eta > 0.0) || eta > 1.0) {
        std::ostringstream os;
        os << "inner order eta must lie in (0, 1], got " << eta;
        throw DomainError(os.str());
    }
    const double C = nu_constant(params, qctl);
    const double g1 = eval_d(f, t).derivative;
    const double h = 1e-5 * (1.0 + std::fabs(t));
    const double g2 = (eval_d(f, t + h).derivative - eval_d(f, t - h).derivative) / (2.0 * h);
    return C * C *
           ((1.0 - eta) * std::pow(t, 1.0 - mu - eta) * g1 +
            std::pow(t, 2.0 - mu - eta) * g2);
}

double closed_form_deriv(ClosedFormKind kind, double a, double t, double mu,
                         const MLParams& params, const QuadratureControl& qctl) {
    require_t_positive(t);
    require_first_order(mu);
    const double C = nu_constant(params, qctl);
    const double pre = C * std::pow(t, 1.0 - mu);
    switch (kind) {
        case ClosedFormKind::exp_at: return pre * a * std::exp(a * t);
        case ClosedFormKind::sin_at: return pre * a * std::cos(a * t);
        case ClosedFormKind::cos_at: return -pre * a * std::sin(a * t);
        case ClosedFormKind::power_a: return C * a * std::pow(t, a - mu);
        case ClosedFormKind::power_mu_over_mu: return C;
        case ClosedFormKind::eigen_exp: return C * std::exp(std::pow(t, mu) / mu);
        case ClosedFormKind::eigen_sin: return C * std::cos(std::pow(t, mu) / mu);
        case ClosedFormKind::eigen_cos: return -C * std::sin(std::pow(t, mu) / mu);
    }
    throw Error("unknown closed form kind");
}

std::string closed_form_expression(ClosedFormKind kind, double a, double mu) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    switch (kind) {
        case ClosedFormKind::exp_at: return "exp(" + num(a) + "*t)";
        case ClosedFormKind::sin_at: return "sin(" + num(a) + "*t)";
        case ClosedFormKind::cos_at: return "cos(" + num(a) + "*t)";
        case ClosedFormKind::power_a: return "t^" + num(a);
        case ClosedFormKind::power_mu_over_mu: return "t^" + num(mu) + "/" + num(mu);
        case ClosedFormKind::eigen_exp: return "exp(t^" + num(mu) + "/" + num(mu) + ")";
        case ClosedFormKind::eigen_sin: return "sin(t^" + num(mu) + "/" + num(mu) + ")";
        case ClosedFormKind::eigen_cos: return "cos(t^" + num(mu) + "/" + num(mu) + ")";
    }
    throw Error("unknown closed form kind");
}

namespace {
void require_series_params(double lambda, double delta) {
    if (!(lambda > 0.0) || !(delta > 0.0)) {
        std::ostringstream os;
        os << "series parameters must be positive, got (" << lambda << ", " << delta << ")";
        throw DomainError(os.str());
    }
}
}  // namespace

double deriv_ml2(double lambda, double delta, double t, double mu, const MLParams& params,
                 const SeriesControl& sctl, const QuadratureControl& qctl) {
    require_series_params(lambda, delta);
    require_t_positive(t);
    require_first_order(mu);
    const double C = nu_constant(params, qctl);
    return C * std::pow(t, 1.0 - mu) * ml3(2.0, lambda, lambda + delta, t, sctl).value;
}

double deriv_ml2_n(double lambda, double delta, double t, double mu, int n,
                   const MLParams& params, const SeriesControl& sctl,
                   const QuadratureControl& qctl) {
    require_series_params(lambda, delta);
    require_t_positive(t);
    if (n < 0) {
        std::ostringstream os;
        os << "derivative order count must be nonnegative, got " << n;
        throw ValidationError(os.str());
    }
    if (!(mu > n) || mu > n + 1.0) {
        std::ostringstream os;
        os << "nth-order form requires mu in (n, n+1], got mu = " << mu << " with n = " << n;
        throw DomainError(os.str());
    }
    const double C = nu_constant(params, qctl);
    const double rho = n + 2.0;
    const double shift = delta + lambda * (n + 1.0);
    return C * std::pow(t, n + 1.0 - mu) * gamma_fn(n + 2.0) *
           ml3(rho, lambda, shift, t, sctl).value;
}

double integral_ml2(double lambda, double delta, double a, double t, double mu,
                    const MLParams& params, const SeriesControl& sctl,
                    const QuadratureControl& qctl) {
    require_series_params(lambda, delta);
    if (!(a >= 0.0) || !(t >= a)) {
        std::ostringstream os;
        os << "integral needs 0 <= a <= t, got a = " << a << ", t = " << t;
        throw DomainError(os.str());
    }
    if (!(mu > 0.0)) {
        std::ostringstream os;
        os << "integral requires mu > 0, got " << mu;
        throw DomainError(os.str());
    }
    sctl.validate();
    const double C = nu_constant(params, qctl);
    if (t == a) return 0.0;
    long double sum = 0.0L, comp = 0.0L;
    int streak = 0;
    bool stopped = false;
    long double t_last = 0.0L;
    int used = 0;
    for (int k = 0; k < sctl.max_terms; ++k) {
        const long double num = powl(static_cast<long double>(t), k + mu) -
                                powl(static_cast<long double>(a), k + mu);
        const long double term =
            num * expl(-static_cast<long double>(lgamma_pos(lambda * k + delta)) -
                       logl(static_cast<long double>(k) + static_cast<long double>(mu)));
        ++used;
        t_last = term;
        const long double s = sum + term;
        if (fabsl(sum) >= fabsl(term))
            comp += (sum - s) + term;
        else
            comp += (term - s) + sum;
        sum = s;
        if (fabsl(term) <= static_cast<long double>(sctl.rel_tol) * fabsl(sum + comp)) {
            if (++streak >= sctl.tail_streak) {
                stopped = true;
                break;
            }
        } else {
            streak = 0;
        }
    }
    if (!stopped) {
        std::ostringstream os;
        os << "termwise integral failed to converge within " << sctl.max_terms
           << " terms (last |term| = " << static_cast<double>(fabsl(t_last)) << ")";
        throw ConvergenceError(os.str());
    }
    (void)used;
    return static_cast<double>(sum + comp) / C;
}

double integral_power_kernel(double lambda, double t, double mu, const MLParams& params,
                             const QuadratureControl& qctl) {
    if (!(lambda > -1.0)) {
        std::ostringstream os;
        os << "power kernel exponent must exceed -1 for integrability, got " << lambda;
        throw DomainError(os.str());
    }
    require_t_positive(t);
    if (!(mu > 0.0)) {
        std::ostringstream os;
        os << "integral requires mu > 0, got " << mu;
        throw DomainError(os.str());
    }
    const double C = nu_constant(params, qctl);
    const double log_b = lgamma_pos(lambda + 1.0) + lgamma_pos(mu) - lgamma_pos(lambda + 1.0 + mu);
    return std::exp(log_b) * std::pow(t, lambda + mu) / C;
}

}  // namespace nucalc
