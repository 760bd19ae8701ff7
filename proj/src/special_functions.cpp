#include <nucalc/special_functions.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace nucalc {

namespace {

bool is_nonneg_integer(double x) {
    return x >= 0.0 && x == std::floor(x) && x <= 9.0e15;  // exactly representable range
}

// Thread-safe lgamma: the libc lgamma writes the sign to a process-wide
// global, so use the _r variant where glibc provides it.
double lgamma_safe(double x) {
#if defined(__GLIBC__) || defined(__linux__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

}  // namespace

void MLParams::validate() const {
    std::ostringstream os;
    if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0)) {
        os << "parameters alpha, beta, gamma must be positive, got (" << alpha << ", " << beta
           << ", " << gamma << ")";
        throw DomainError(os.str());
    }
    if (!(c > gamma)) {
        os << "parameter c must exceed gamma, got c = " << c << " with gamma = " << gamma;
        throw DomainError(os.str());
    }
    if (!(p >= 0.0)) {
        os << "parameter p must be nonnegative, got " << p;
        throw DomainError(os.str());
    }
}

double gamma_fn(double x) {
    if (std::isnan(x)) throw DomainError("gamma of NaN");
    if (x <= 0.0 && x == std::floor(x)) {
        std::ostringstream os;
        os << "gamma pole at x = " << x;
        throw PoleError(os.str());
    }
    const double g = std::tgamma(x);
    if (!std::isfinite(g)) {
        std::ostringstream os;
        os << "gamma(" << x << ") exceeds double range";
        throw OverflowError(os.str());
    }
    return g;
}

double log_gamma(double x) {
    if (!(x > 0.0)) {
        std::ostringstream os;
        os << "log_gamma requires x > 0, got " << x;
        throw DomainError(os.str());
    }
    return lgamma_safe(x);
}

double pochhammer(double c, double x) {
    if (std::isnan(c) || std::isnan(x)) throw DomainError("pochhammer of NaN");
    if (x == 0.0) return 1.0;
    if (is_nonneg_integer(x) && (c <= 0.0 || x <= 256.0)) {
        // Direct product: exact for small counts and the only meaningful
        // reading when c is zero or negative (factors may vanish or flip sign).
        const long n = static_cast<long>(x);
        double prod = 1.0;
        for (long k = 0; k < n; ++k) {
            prod *= c + static_cast<double>(k);
            if (prod == 0.0) return 0.0;
            if (!std::isfinite(prod)) {
                std::ostringstream os;
                os << "pochhammer(" << c << ", " << x << ") exceeds double range";
                throw OverflowError(os.str());
            }
        }
        return prod;
    }
    if (!(c > 0.0) || !(c + x > 0.0)) {
        std::ostringstream os;
        os << "pochhammer(" << c << ", " << x
           << ") hits a gamma pole; need c > 0 and c + x > 0 for non-integer counts";
        throw PoleError(os.str());
    }
    const double lg = lgamma_safe(c + x) - lgamma_safe(c);
    const double r = std::exp(lg);
    if (!std::isfinite(r)) {
        std::ostringstream os;
        os << "pochhammer(" << c << ", " << x << ") exceeds double range";
        throw OverflowError(os.str());
    }
    return r;
}

double beta_fn(double z, double y) {
    if (!(z > 0.0) || !(y > 0.0)) {
        std::ostringstream os;
        os << "beta requires positive arguments, got (" << z << ", " << y << ")";
        throw DomainError(os.str());
    }
    return std::exp(lgamma_safe(z) + lgamma_safe(y) - lgamma_safe(z + y));
}

namespace {

// p > 0 integrand, assembled in log space so the power factors cannot
// overflow before the essential decay exp(-p/(u(1-u))) kills them.
double extbeta_integrand(double u, double z, double y, double p) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double log_pow = (z - 1.0) * std::log(u) + (y - 1.0) * std::log1p(-u);
    return std::exp(log_pow - p / (u * (1.0 - u)));
}

}  // namespace

QuadResult extended_beta_full(double z, double y, double p, const QuadratureControl& ctl) {
    if (!(z > 0.0) || !(y > 0.0)) {
        std::ostringstream os;
        os << "extended beta requires positive exponents, got (" << z << ", " << y << ")";
        throw DomainError(os.str());
    }
    if (!(p >= 0.0)) {
        std::ostringstream os;
        os << "extended beta requires p >= 0, got " << p;
        throw DomainError(os.str());
    }
    if (p > 0.0) {
        return integrate_adaptive([=](double u) { return extbeta_integrand(u, z, y, p); }, 0.0,
                                  1.0, ctl);
    }
    // p = 0: split at 1/2 and substitute u = s^(1/z) (resp. 1-u = r^(1/y)),
    // which turns u^(z-1) du into ds/z and removes the endpoint singularity
    // for every positive exponent.
    const auto left = integrate_adaptive(
        [=](double s) { return std::pow(1.0 - std::pow(s, 1.0 / z), y - 1.0) / z; }, 0.0,
        std::pow(0.5, z), ctl);
    const auto right = integrate_adaptive(
        [=](double r) { return std::pow(1.0 - std::pow(r, 1.0 / y), z - 1.0) / y; }, 0.0,
        std::pow(0.5, y), ctl);
    QuadResult out;
    out.value = left.value + right.value;
    out.error_estimate = left.error_estimate + right.error_estimate;
    out.levels_used = std::max(left.levels_used, right.levels_used);
    return out;
}

double extended_beta(double z, double y, double p, const QuadratureControl& ctl) {
    return extended_beta_full(z, y, p, ctl).value;
}

double nu_constant(const MLParams& params, const QuadratureControl& ctl) {
    params.validate();
    const double bp = extended_beta(params.gamma + 1.0, params.c - params.gamma, params.p, ctl);
    const double log_scale = lgamma_safe(params.beta) + lgamma_safe(params.c + 1.0) -
                             lgamma_safe(params.gamma) - lgamma_safe(params.c - params.gamma) -
                             lgamma_safe(params.alpha + params.beta);
    const double c = bp * std::exp(log_scale);
    if (!std::isfinite(c)) {
        std::ostringstream os;
        os << "scaling constant overflows at (alpha=" << params.alpha << ", beta=" << params.beta
           << ", gamma=" << params.gamma << ", c=" << params.c << ", p=" << params.p << ")";
        throw OverflowError(os.str());
    }
    return c;
}

}  // namespace nucalc
