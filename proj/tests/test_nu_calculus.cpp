#include "doctest.h"
#include "oracles.hpp"

#include <nucalc/nu_calculus.hpp>

#include <cmath>
#include <vector>

using namespace nucalc;

TEST_CASE("chain-form derivative closed values") {
    const FnHandle sq = parse("t^2");
    CHECK(deriv_chain(sq, 1.7, 1.0) == doctest::Approx(2 * 1.7).epsilon(1e-13));
    CHECK(deriv_chain(sq, 1.7, 0.5) == doctest::Approx(2 * std::pow(1.7, 1.5)).epsilon(1e-13));
    // order 1 at canonical parameters reduces to the plain derivative
    const FnHandle mix = parse("sin(t) * exp(t / 2)");
    for (double t : {0.4, 1.0, 2.3}) {
        CHECK(deriv_chain(mix, t, 1.0) ==
              doctest::Approx(eval_d(mix, t).derivative).epsilon(1e-14));
    }
}

TEST_CASE("chain-form derivative of a constant vanishes") {
    CHECK(deriv_chain(parse("7"), 3.0, 0.3) == 0.0);
}

TEST_CASE("chain-form derivative scales with the parameter constant") {
    const MLParams params{1.1, 0.8, 1.3, 2.4, 0.7};
    const double C = nu_constant(params);
    const FnHandle f = parse("t^3");
    const double t = 1.4, mu = 0.6;
    CHECK(deriv_chain(f, t, mu, params) ==
          doctest::Approx(C * std::pow(t, 1.0 - mu) * 3.0 * t * t).epsilon(1e-13));
}

TEST_CASE("chain-form derivative domain checks") {
    CHECK_THROWS_AS(deriv_chain(parse("t"), 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(deriv_chain(parse("t"), -1.0, 0.5), DomainError);
    CHECK_THROWS_AS(deriv_chain(parse("t"), 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(deriv_chain(parse("t"), 1.0, 1.5), DomainError);
}

TEST_CASE("limit-form derivative converges to the chain form") {
    const DerivResult r = deriv_limit(parse("exp(t)"), 1.25, 0.5);
    const double chain = deriv_chain(parse("exp(t)"), 1.25, 0.5);
    CHECK(std::fabs(r.value - chain) / std::fabs(chain) <= 1e-6);
    CHECK(r.per_eps.size() == EpsilonSchedule{}.eps.size());
    // raw quotients approach the limit from a first-order error model
    CHECK(r.observed_order == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("limit-form derivative raw quotients shrink toward the limit") {
    const DerivResult r = deriv_limit(parse("t^2"), 1.0, 0.5);
    REQUIRE(r.per_eps.size() >= 2);
    const double limit = 2.0;
    const double first = std::fabs(r.per_eps.front().second - limit);
    const double last = std::fabs(r.per_eps.back().second - limit);
    CHECK(last < first);
    CHECK(r.value == doctest::Approx(limit).epsilon(1e-7));
}

TEST_CASE("limit-form derivative guards its regime") {
    CHECK_THROWS_AS(deriv_limit(parse("t"), 1.0, 0.5, 1, MLParams{1, 1, 1, 2, 0.5}),
                    UnsupportedRegime);
    CHECK_THROWS_AS(deriv_limit(parse("t"), 1.0, 0.5, 0), ValidationError);
    EpsilonSchedule bad;
    bad.eps = {};
    CHECK_THROWS_AS(deriv_limit(parse("t"), 1.0, 0.5, 1, MLParams{}, bad), ValidationError);
    bad.eps = {1e-3, 1e-2};  // not decreasing
    CHECK_THROWS_AS(deriv_limit(parse("t"), 1.0, 0.5, 1, MLParams{}, bad), ValidationError);
}

TEST_CASE("nth-order derivative at a cubic") {
    // mu in (1, 2]: quotient runs on f' and tends to C t^(2-mu) f''
    const DerivResult r = deriv_n(parse("t^3"), 1.0, 1.5, 1);
    CHECK(r.value == doctest::Approx(6.0).epsilon(1e-6));
    const DerivResult r0 = deriv_n(parse("t^3"), 1.3, 0.5, 0);
    CHECK(r0.value == doctest::Approx(deriv_chain(parse("t^3"), 1.3, 0.5)).epsilon(1e-6));
}

TEST_CASE("nth-order derivative validates its order window") {
    CHECK_THROWS_AS(deriv_n(parse("t^3"), 1.0, 0.5, 1), DomainError);   // mu must exceed n
    CHECK_THROWS_AS(deriv_n(parse("t^3"), 1.0, 2.5, 1), DomainError);   // mu past n+1
    CHECK_THROWS_AS(deriv_n(parse("t^3"), 1.0, 0.5, -1), ValidationError);
    CHECK_THROWS_AS(deriv_n(parse("t^3"), 1.0, 1.5, 1, MLParams{1, 1, 1, 2, 1}),
                    UnsupportedRegime);
}

TEST_CASE("weighted integral analytic anchors") {
    CHECK(integral(parse("1"), 0, 1, 0.5) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(integral(parse("exp(t)"), 0.3, 1.4, 0.5) ==
          doctest::Approx(2.927620261012636).epsilon(1e-11));
    // t = a collapses to zero exactly
    CHECK(integral(parse("t"), 1.0, 1.0, 0.7) == 0.0);
    // power rule: integral of 1 is (t^mu - a^mu) / (mu C)
    const double mu = 0.35;
    CHECK(integral(parse("1"), 0.2, 1.9, mu) ==
          doctest::Approx((std::pow(1.9, mu) - std::pow(0.2, mu)) / mu).epsilon(1e-11));
}

TEST_CASE("weighted integral against the independent integrator") {
    const MLParams params{1.1, 0.8, 1.3, 2.4, 0.7};
    const double C = nu_constant(params);
    const FnHandle f = parse("sin(t) + t^2");
    auto fe = [&](double x) { return eval(f, x); };
    for (double mu : {0.3, 0.8, 1.6}) {
        const double got = integral(f, 0.0, 1.3, mu, params);
        const double want = testutil::oracle_weighted_integral(fe, 0.0, 1.3, mu, C);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("weighted integral accepts orders above one") {
    CHECK(integral(parse("1"), 0, 1, 1.7) == doctest::Approx(1.0 / 1.7).epsilon(1e-11));
}

TEST_CASE("weighted integral domain checks") {
    CHECK_THROWS_AS(integral(parse("t"), -0.5, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(integral(parse("t"), 0.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(integral(parse("t"), 1.0, 0.5, 0.5), DomainError);  // reversed limits
}

TEST_CASE("integral_full exposes the quadrature diagnostics") {
    const QuadResult r = integral_full(parse("exp(t)"), 0.3, 1.4, 0.5);
    CHECK(r.value == doctest::Approx(2.927620261012636).epsilon(1e-11));
    CHECK(r.error_estimate < 1e-9);
}

TEST_CASE("two-order derivative composition closed form") {
    // C = 1: (1-eta) t^(1-mu-eta) g' + t^(2-mu-eta) g''; g = t^2 at t = 1
    CHECK(compose_deriv(parse("t^2"), 1.0, 0.2, 0.7) ==
          doctest::Approx(2.0 * (1.0 - 0.7) + 2.0).epsilon(1e-9));
    // composition differs from the single derivative of summed order
    const double composed = compose_deriv(parse("t^2"), 1.0, 0.2, 0.7);
    const double single = deriv_chain(parse("t^2"), 1.0, 0.9);
    CHECK(std::fabs(composed - single) > 1e-3);
}

TEST_CASE("closed-form derivative table agrees with the chain form") {
    const MLParams params{0.5, 2, 1.5, 3, 1};
    const double t = 1.3, mu = 0.45, a = 1.2;
    for (ClosedFormKind kind :
         {ClosedFormKind::exp_at, ClosedFormKind::sin_at, ClosedFormKind::cos_at,
          ClosedFormKind::power_a, ClosedFormKind::power_mu_over_mu, ClosedFormKind::eigen_exp,
          ClosedFormKind::eigen_sin, ClosedFormKind::eigen_cos}) {
        const FnHandle g = parse(closed_form_expression(kind, a, mu));
        const double want = deriv_chain(g, t, mu, params);
        const double got = closed_form_deriv(kind, a, t, mu, params);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("eigenfunction closed forms at canonical parameters") {
    // t = 1, mu = 0.5 puts the inner argument at exactly 2
    CHECK(closed_form_deriv(ClosedFormKind::eigen_exp, 1, 1, 0.5) ==
          doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(closed_form_deriv(ClosedFormKind::eigen_sin, 1, 1, 0.5) ==
          doctest::Approx(std::cos(2.0)).epsilon(1e-12));
    CHECK(closed_form_deriv(ClosedFormKind::eigen_cos, 1, 1, 0.5) ==
          doctest::Approx(-std::sin(2.0)).epsilon(1e-12));
    // the mu-power case is the constant function C
    CHECK(closed_form_deriv(ClosedFormKind::power_mu_over_mu, 0, 1.7, 0.5) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("series derivative of the two-parameter function") {
    // lambda = delta = 1 is the exponential, its derivative at t = 1 is e
    CHECK(deriv_ml2(1, 1, 1, 0.5) == doctest::Approx(std::exp(1.0)).epsilon(1e-11));
    CHECK_THROWS_AS(deriv_ml2(-1, 1, 1, 0.5), DomainError);
    CHECK_THROWS_AS(deriv_ml2(1, -1, 1, 0.5), DomainError);
}

TEST_CASE("series derivative against a termwise oracle") {
    // d/dt E_{lambda, delta}(t) = sum_{k>=1} k t^(k-1) / Gamma(lambda k + delta)
    for (auto [lambda, delta] : {std::pair{0.8, 1.2}, std::pair{1.5, 0.9}}) {
        const double t = 1.1, mu = 0.4;
        long double s = 0.0L;
        for (int k = 1; k < 200; ++k) {
            s += static_cast<long double>(k) * powl(t, k - 1) /
                 tgammal(static_cast<long double>(lambda) * k + delta);
        }
        const double want = std::pow(t, 1.0 - mu) * static_cast<double>(s);
        CHECK(deriv_ml2(lambda, delta, t, mu) == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("nth series derivative reference") {
    CHECK(deriv_ml2_n(1, 1, 1, 1.5, 1) ==
          doctest::Approx(gamma_fn(3) * ml3(3, 1, 3, 1).value).epsilon(1e-11));
    // n = 0 agrees with the first-order operator
    CHECK(deriv_ml2_n(1.2, 0.9, 1.1, 0.6, 0) ==
          doctest::Approx(deriv_ml2(1.2, 0.9, 1.1, 0.6)).epsilon(1e-12));
}

TEST_CASE("termwise series integral") {
    CHECK(integral_ml2(1, 1, 0, 1, 0.5) == doctest::Approx(2.925303491814363).epsilon(1e-11));
    // against the quadrature route through the generic operator
    const double lambda = 1.4, delta = 0.8, a = 0.3, t = 1.2, mu = 0.6;
    auto series = [&](double x) { return ml3(1, lambda, delta, x).value; };
    const double got = integral_ml2(lambda, delta, a, t, mu);
    const double want = testutil::oracle_weighted_integral(series, a, t, mu, 1.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
    CHECK_THROWS_AS(integral_ml2(1, -2, 0, 1, 0.5), DomainError);
}

TEST_CASE("power-kernel integral closed form") {
    CHECK(integral_power_kernel(1, 1, 0.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    // general closed form Gamma(lambda+1) Gamma(mu) / Gamma(lambda+1+mu) t^(lambda+mu)
    const double lambda = 0.7, t = 1.4, mu = 0.55;
    const double want = gamma_fn(lambda + 1) * gamma_fn(mu) / gamma_fn(lambda + 1 + mu) *
                        std::pow(t, lambda + mu);
    CHECK(integral_power_kernel(lambda, t, mu) == doctest::Approx(want).epsilon(1e-12));
    CHECK_THROWS_AS(integral_power_kernel(-1.0, 1.0, 0.5), DomainError);
}
