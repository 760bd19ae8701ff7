#include "doctest.h"

#include <nucalc/mittag_leffler.hpp>

#include <cmath>

using namespace nucalc;

TEST_CASE("three-parameter series reference points") {
    CHECK(ml3(1.5, 0.7, 1.2, 0.8).value == doctest::Approx(3.842377197712758).epsilon(1e-12));
    CHECK(ml3(2.5, 0.4, 0.9, 0.35).value == doctest::Approx(2.918716639282990).epsilon(1e-12));
    CHECK(ml3(2, 1, 2, 1).value == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
}

TEST_CASE("three-parameter series with alternating terms keeps accuracy") {
    // z < 0 exercises the compensated accumulation
    CHECK(ml3(1.5, 0.7, 1.2, -1.3).value == doctest::Approx(0.2262037256267494).epsilon(1e-12));
}

TEST_CASE("one-parameter special values") {
    CHECK(ml1(1, 1).value == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
    CHECK(ml1(2, 1).value == doctest::Approx(std::cosh(1.0)).epsilon(1e-13));
    // cancellation-heavy: relative to e^-5 = 6.7e-3
    CHECK(std::fabs(ml1(1, -5).value - std::exp(-5.0)) <= 1e-12);
    CHECK(ml1(0.5, 0.0).value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("series diagnostics are populated") {
    const SeriesResult r = ml3(1.5, 0.7, 1.2, 0.8);
    CHECK(r.terms_used > 3);
    CHECK(r.terms_used < 200);
    CHECK(r.tail_estimate >= 0.0);
    CHECK(r.tail_estimate <= 1e-10 * std::fabs(r.value));
}

TEST_CASE("series parameter validation") {
    CHECK_THROWS_AS(ml3(1.5, -0.7, 1.2, 0.5), DomainError);
    CHECK_THROWS_AS(ml3(1.5, 0.7, 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(ml1(0.0, 0.5), DomainError);
    SeriesControl bad;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(ml3(1.5, 0.7, 1.2, 0.5, bad), ValidationError);
    bad = SeriesControl{};
    bad.max_terms = 0;
    CHECK_THROWS_AS(ml3(1.5, 0.7, 1.2, 0.5, bad), ValidationError);
}

TEST_CASE("regularized extension reference points") {
    CHECK(ml_extended(1, 1, 1, 2, 1, 0.5).value ==
          doctest::Approx(0.01135338461024392).epsilon(1e-11));
    CHECK(ml_extended(0.8, 1.1, 1.4, 2.2, 0.5, -0.7).value ==
          doctest::Approx(0.02888023627716635).epsilon(1e-11));
}

TEST_CASE("regularized extension reduces to the plain series at p = 0") {
    CHECK(ml_extended(1.5, 0.7, 1.2, 2.9, 0.0, 0.8).value ==
          doctest::Approx(ml3(1.2, 1.5, 0.7, 0.8).value).epsilon(1e-12));
    CHECK(ml_extended(1.0, 1.0, 1.0, 2.0, 0.0, 1.0).value ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("step-q generalization closed form inside the convergence disk") {
    // step 2 at unit parameters sums binomial(2n, n) z^n = (1 - 4z)^(-1/2)
    const double z = 0.2;
    CHECK(ml_extended_gen(1, 1, 1, 2, 3, 0, z).value ==
          doctest::Approx(1.0 / std::sqrt(1.0 - 4.0 * z)).epsilon(1e-12));
    const double z2 = 0.1;
    CHECK(ml_extended_gen(1, 1, 1, 2, 3, 0, z2).value ==
          doctest::Approx(1.0 / std::sqrt(1.0 - 4.0 * z2)).epsilon(1e-12));
}

TEST_CASE("step-q generalization reference point and step-1 reduction") {
    CHECK(ml_extended_gen(1.1, 0.9, 1.2, 0.7, 2.5, 0.5, 0.6).value ==
          doctest::Approx(0.1274003063215993).epsilon(1e-11));
    CHECK(ml_extended_gen(0.9, 1.3, 1.1, 1, 2.4, 0.5, 0.7).value ==
          doctest::Approx(ml_extended(0.9, 1.3, 1.1, 2.4, 0.5, 0.7).value).epsilon(1e-12));
}

TEST_CASE("step-q generalization reports divergence past the radius") {
    // at step 2 with unit orders the terms grow like (4z)^n for z > 1/4
    CHECK_THROWS_AS(ml_extended_gen(1, 1, 1, 2, 3, 0, 0.3), ConvergenceError);
}

TEST_CASE("truncated series matches a hand-rolled polynomial evaluation") {
    MLParams params;  // canonical
    const auto coeff = truncated_coefficients(3, params);
    REQUIRE(coeff.size() == 4);
    const double z = 0.37;
    long double horner = 0.0L;
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) horner = horner * z + *it;
    CHECK(ml_truncated(3, params, z) == doctest::Approx(static_cast<double>(horner)).epsilon(1e-15));
}

TEST_CASE("normalized truncated series expands as 1 + z at canonical parameters") {
    MLParams params;  // scaling constant 1, so the linear coefficient is 1
    const double z = 1e-3;
    CHECK(s_truncated(1, params, z) == doctest::Approx(1.0 + z).epsilon(1e-12));
    CHECK(s_truncated(1, params, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("truncated series validation") {
    CHECK_THROWS_AS(truncated_coefficients(-1, MLParams{}), ValidationError);
    CHECK_THROWS_AS(ml_truncated(2, MLParams{0, 1, 1, 2, 0}, 0.5), DomainError);
}
