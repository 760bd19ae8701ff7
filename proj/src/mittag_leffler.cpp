#include <nucalc/mittag_leffler.hpp>

#include <cmath>
#include <functional>
#include <sstream>

namespace nucalc {

void SeriesControl::validate() const {
    if (!(rel_tol > 0.0) || !(rel_tol < 1.0)) {
        std::ostringstream os;
        os << "series rel_tol must lie in (0, 1), got " << rel_tol;
        throw ValidationError(os.str());
    }
    if (max_terms < 1) {
        std::ostringstream os;
        os << "series max_terms must be positive, got " << max_terms;
        throw ValidationError(os.str());
    }
    if (tail_streak < 1) {
        std::ostringstream os;
        os << "series tail_streak must be positive, got " << tail_streak;
        throw ValidationError(os.str());
    }
}

namespace {

// lgamma for long double without the signgam global.
long double lgammal_safe(long double x) {
#if defined(__GLIBC__) || defined(__linux__)
    int sign = 0;
    return ::lgammal_r(x, &sign);
#else
    return std::lgamma(static_cast<double>(x));
#endif
}

// Shared series driver.  Terms are produced one at a time in extended
// precision; summation is Neumaier-compensated so the result's accuracy is
// limited by the terms, not the additions.  The stopping rule requires
// `tail_streak` consecutive terms below rel_tol * |partial sum| (a single
// small term is no proof of convergence when signs alternate).
SeriesResult run_series(const SeriesControl& ctl,
                        const std::function<long double(int)>& term_fn) {
    ctl.validate();
    long double sum = 0.0L, comp = 0.0L;
    long double t_prev = 0.0L, t_last = 0.0L;
    int streak = 0;
    int used = 0;
    bool stopped = false;
    while (used < ctl.max_terms) {
        const long double t = term_fn(used);
        ++used;
        if (std::isnan(static_cast<double>(t))) {
            throw ConvergenceError("series term evaluated to NaN");
        }
        if (std::isinf(static_cast<double>(t))) {
            std::ostringstream os;
            os << "series term " << used - 1 << " overflows double range";
            throw OverflowError(os.str());
        }
        const long double s = sum + t;
        if (std::fabs(static_cast<double>(sum)) >= std::fabs(static_cast<double>(t)))
            comp += (sum - s) + t;
        else
            comp += (t - s) + sum;
        sum = s;
        t_prev = t_last;
        t_last = t;
        const long double partial = sum + comp;
        // Stop on the projected tail, not the bare term: with magnitudes
        // shrinking geometrically at ratio r the remainder is ~ |t| r/(1-r),
        // which for r near 1 dwarfs the term itself.
        long double tail = fabsl(t);
        if (fabsl(t_prev) > 0.0L && fabsl(t) < fabsl(t_prev)) {
            const long double ratio = fabsl(t) / fabsl(t_prev);
            tail = fmaxl(tail, fabsl(t) * ratio / (1.0L - ratio));
        }
        if (tail <= static_cast<long double>(ctl.rel_tol) * fabsl(partial)) {
            if (++streak >= ctl.tail_streak) {
                stopped = true;
                break;
            }
        } else {
            streak = 0;
        }
    }
    if (!stopped) {
        std::ostringstream os;
        os << "series failed to converge within " << ctl.max_terms << " terms (last |term| = "
           << static_cast<double>(fabsl(t_last)) << ")";
        throw ConvergenceError(os.str());
    }
    SeriesResult r;
    r.value = static_cast<double>(sum + comp);
    r.terms_used = used;
    const double a_last = static_cast<double>(fabsl(t_last));
    const double a_prev = static_cast<double>(fabsl(t_prev));
    if (a_last == 0.0) {
        r.tail_estimate = 0.0;
    } else if (a_prev > 0.0 && a_last < a_prev) {
        const double ratio = a_last / a_prev;  // geometric tail bound
        r.tail_estimate = a_last * ratio / (1.0 - ratio);
    } else {
        r.tail_estimate = a_last * ctl.tail_streak;
    }
    return r;
}

}  // namespace

SeriesResult ml3(double rho, double lambda, double delta, double z, const SeriesControl& ctl) {
    if (!(rho > 0.0) || !(lambda > 0.0) || !(delta > 0.0)) {
        std::ostringstream os;
        os << "ml3 requires rho, lambda, delta > 0, got (" << rho << ", " << lambda << ", "
           << delta << ")";
        throw DomainError(os.str());
    }
    const long double lg_rho = lgammal_safe(rho);
    const long double log_abs_z = (z == 0.0) ? 0.0L : logl(fabsl(static_cast<long double>(z)));
    return run_series(ctl, [=](int n) -> long double {
        if (z == 0.0 && n > 0) return 0.0L;
        const long double ln = static_cast<long double>(n);
        long double lt = lgammal_safe(rho + ln) - lg_rho -
                         lgammal_safe(lambda * ln + delta) - lgammal_safe(ln + 1.0L) +
                         ln * log_abs_z;
        long double t = expl(lt);
        if (z < 0.0 && (n & 1)) t = -t;
        return t;
    });
}

SeriesResult ml1(double alpha, double z, const SeriesControl& ctl) {
    return ml3(1.0, alpha, 1.0, z, ctl);
}

SeriesResult ml_extended(double theta, double vartheta, double nu, double c, double p, double z,
                         const SeriesControl& ctl, const QuadratureControl& qctl) {
    std::ostringstream os;
    if (!(theta > 0.0) || !(vartheta > 0.0)) {
        os << "ml_extended requires theta, vartheta > 0, got (" << theta << ", " << vartheta
           << ")";
        throw DomainError(os.str());
    }
    if (!(nu > 0.0) || !(c > nu)) {
        os << "ml_extended requires 0 < nu < c, got nu = " << nu << ", c = " << c;
        throw DomainError(os.str());
    }
    if (!(p >= 0.0)) {
        os << "ml_extended requires p >= 0, got " << p;
        throw DomainError(os.str());
    }
    const long double log_bden = static_cast<long double>(std::log(beta_fn(nu, c - nu)));
    const long double lg_c = lgammal_safe(c);
    const long double log_abs_z = (z == 0.0) ? 0.0L : logl(fabsl(static_cast<long double>(z)));
    return run_series(ctl, [=](int n) -> long double {
        if (z == 0.0 && n > 0) return 0.0L;
        const double bp = extended_beta(nu + n, c - nu, p, qctl);
        if (bp == 0.0) return 0.0L;
        const long double ln = static_cast<long double>(n);
        long double lt = logl(static_cast<long double>(bp)) - log_bden +
                         (lgammal_safe(c + ln) - lg_c) - lgammal_safe(theta * ln + vartheta) -
                         lgammal_safe(ln + 1.0L) + ln * log_abs_z;
        long double t = expl(lt);
        if (z < 0.0 && (n & 1)) t = -t;
        return t;
    });
}

SeriesResult ml_extended_gen(double mu, double delta, double vartheta, double q, double c,
                             double p, double z, const SeriesControl& ctl,
                             const QuadratureControl& qctl) {
    std::ostringstream os;
    if (!(mu > 0.0) || !(delta > 0.0) || !(q > 0.0)) {
        os << "ml_extended_gen requires mu, delta, q > 0, got (" << mu << ", " << delta << ", "
           << q << ")";
        throw DomainError(os.str());
    }
    if (!(vartheta > 0.0) || !(c > vartheta)) {
        os << "ml_extended_gen requires 0 < vartheta < c, got vartheta = " << vartheta
           << ", c = " << c;
        throw DomainError(os.str());
    }
    if (!(p >= 0.0)) {
        os << "ml_extended_gen requires p >= 0, got " << p;
        throw DomainError(os.str());
    }
    const long double log_bden =
        static_cast<long double>(std::log(beta_fn(vartheta, c - vartheta)));
    const long double lg_c = lgammal_safe(c);
    const long double log_abs_z = (z == 0.0) ? 0.0L : logl(fabsl(static_cast<long double>(z)));
    return run_series(ctl, [=](int n) -> long double {
        if (z == 0.0 && n > 0) return 0.0L;
        const long double ln = static_cast<long double>(n);
        const double step = n * q;
        const double bp = extended_beta(vartheta + step, c - vartheta, p, qctl);
        if (bp == 0.0) return 0.0L;
        long double lt = logl(static_cast<long double>(bp)) - log_bden +
                         (lgammal_safe(c + static_cast<long double>(step)) - lg_c) -
                         lgammal_safe(mu * ln + delta) - lgammal_safe(ln + 1.0L) +
                         ln * log_abs_z;
        long double t = expl(lt);
        if (z < 0.0 && (n & 1)) t = -t;
        return t;
    });
}

std::vector<double> truncated_coefficients(int i, const MLParams& params,
                                           const QuadratureControl& qctl) {
    if (i < 0) {
        std::ostringstream os;
        os << "truncation index must be nonnegative, got " << i;
        throw ValidationError(os.str());
    }
    params.validate();
    // Denominator beta is the plain Euler integral for every p; only the
    // per-term numerator carries the regularizing factor.
    const long double log_bden =
        static_cast<long double>(std::log(beta_fn(params.gamma, params.c - params.gamma)));
    const long double lg_c = lgammal_safe(params.c);
    std::vector<double> a(static_cast<std::size_t>(i) + 1);
    for (int n = 0; n <= i; ++n) {
        const double bp =
            extended_beta(params.gamma + n, params.c - params.gamma, params.p, qctl);
        if (bp == 0.0) {
            a[static_cast<std::size_t>(n)] = 0.0;
            continue;
        }
        const long double ln = static_cast<long double>(n);
        const long double lt = logl(static_cast<long double>(bp)) - log_bden +
                               (lgammal_safe(params.c + ln) - lg_c) -
                               lgammal_safe(params.alpha * ln + params.beta) -
                               lgammal_safe(ln + 1.0L);
        a[static_cast<std::size_t>(n)] = static_cast<double>(expl(lt));
    }
    return a;
}

double ml_truncated(int i, const MLParams& params, double z, const QuadratureControl& qctl) {
    const auto a = truncated_coefficients(i, params, qctl);
    long double acc = 0.0L;  // Horner, highest degree first
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        acc = acc * static_cast<long double>(z) + static_cast<long double>(*it);
    }
    return static_cast<double>(acc);
}

double s_truncated(int i, const MLParams& params, double z, const QuadratureControl& qctl) {
    return gamma_fn(params.beta) * ml_truncated(i, params, z, qctl);
}

}  // namespace nucalc
