#include "doctest.h"

#include "rwfit/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace rwfit;

TEST_SUITE("distribution") {

TEST_CASE("pdf closed-form points") {
    CHECK(pdf(-1.0, {1.0, 1.0, 0.0}) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(pdf(-1.0, {2.0, 1.0, 0.0}) ==
          doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(pdf(0.5, {2.0, 1.0, 0.0}) == 0.0);
    // at the endpoint the density is 0 by convention, every shape
    CHECK(pdf(0.0, {2.0, 1.0, 0.0}) == 0.0);
    CHECK(pdf(0.0, {0.5, 1.0, 0.0}) == 0.0);
}

TEST_CASE("cdf closed-form points and shape") {
    CHECK(cdf(-1.0, {1.0, 1.0, 0.0}) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(cdf(0.0, {2.0, 3.0, 0.0}) == 1.0);
    CHECK(cdf(5.0, {2.0, 3.0, 0.0}) == 1.0);
    CHECK(cdf(-std::log(2.0), {1.0, 1.0, 0.0}) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(cdf(-1e12, {1.0, 1.0, 0.0}) == 0.0);

    for (double d : {0.5, 1.0, 2.0, 5.0}) {
        RwParams p{d, 2.0, 1.0};
        double prev = -1.0;
        for (int i = 0; i <= 60; ++i) {
            const double x = 1.0 - 12.0 + 12.5 * i / 60.0;
            const double c = cdf(x, p);
            CHECK(c >= prev);
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
            prev = c;
        }
    }
}

TEST_CASE("cdf derivative matches pdf") {
    for (double d : {0.5, 1.0, 2.0, 5.0}) {
        RwParams p{d, 1.5, 2.0};
        for (int i = 1; i <= 100; ++i) {
            const double x = p.gamma - 5.0 * p.beta +
                             5.0 * p.beta * i / 101.0;
            const double dist = p.gamma - x;
            const double h = 1e-4 * std::min(p.beta, dist / 2.0);
            const double fd = (cdf(x + h, p) - cdf(x - h, p)) / (2.0 * h);
            const double f = pdf(x, p);
            if (f > 1e-300)
                CHECK(fd == doctest::Approx(f).epsilon(1e-6));
            else
                CHECK(std::abs(fd) < 1e-250);
        }
    }
}

TEST_CASE("quantile closed forms and round trip") {
    CHECK(quantile(std::exp(-1.0), {1.0, 1.0, 0.0}) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(quantile(0.5, {1.0, 1.0, 0.0}) ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-13));
    CHECK(quantile(0.5, {2.0, 10.0, 5.0}) ==
          doctest::Approx(-3.325546111576978).epsilon(1e-13));

    for (double d : {0.5, 1.0, 2.0, 5.0}) {
        RwParams p{d, 3.0, -1.0};
        for (int i = 1; i <= 99; ++i) {
            const double u = i / 100.0;
            CHECK(cdf(quantile(u, p), p) == doctest::Approx(u).epsilon(1e-10));
        }
    }

    CHECK_THROWS_AS(quantile(0.0, {1.0, 1.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(quantile(1.0, {1.0, 1.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(quantile(-0.5, {1.0, 1.0, 0.0}), std::domain_error);
}

TEST_CASE("sample determinism, support, sorting") {
    RwParams p{2.0, 10.0, 0.0};
    Sample a = sample(500, p, 123);
    Sample b = sample(500, p, 123);
    Sample c = sample(500, p, 124);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(std::is_sorted(a.values.begin(), a.values.end()));
    for (double x : a.values) CHECK(x < p.gamma);
}

TEST_CASE("sample mean against the closed-form mean") {
    RwParams p{2.0, 10.0, 0.0};
    Sample s = sample(1000000, p, 2024);
    double mean = 0.0;
    for (double x : s.values) mean += x;
    mean /= static_cast<double>(s.n());
    // E[X] = -10 Gamma(1.5) = -8.8623; 3 sigma of the MC mean ~ 0.014
    CHECK(mean == doctest::Approx(-8.86226925452758).epsilon(0.006));
}

TEST_CASE("moment_gm closed forms") {
    CHECK(moment_gm(1, {1.0, 2.0, 5.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(moment_gm(2, {1.0, 1.0, -3.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(moment_gm(3, {2.0, 1.0, 0.0}) ==
          doctest::Approx(1.329340388179137).epsilon(1e-13));

    // k = 1 ties to the raw mean: E(gamma - X) = gamma - E[X]
    RwParams p{3.2, 4.5, 1.25};
    auto rm = raw_moments(p);
    CHECK(moment_gm(1, p) == doctest::Approx(p.gamma - rm.m1).epsilon(1e-12));
}

TEST_CASE("raw_moments closed forms") {
    auto rm = raw_moments({1.0, 1.0, 0.0});
    CHECK(rm.m1 == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(rm.m2 == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(rm.m3 == doctest::Approx(-6.0).epsilon(1e-13));

    CHECK(raw_moments({2.0, 1.0, 0.0}).m1 ==
          doctest::Approx(-0.886226925452758).epsilon(1e-13));
}

TEST_CASE("raw moments satisfy the binomial identity in the central moments") {
    std::mt19937 rng(555);
    std::uniform_real_distribution<double> ud(0.4, 6.0), ub(0.5, 20.0),
        ug(-10.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        RwParams p{ud(rng), ub(rng), ug(rng)};
        const double g1 = moment_gm(1, p), g2 = moment_gm(2, p),
                     g3 = moment_gm(3, p);
        auto rm = raw_moments(p);
        const double e1 = p.gamma - g1;
        const double e2 = p.gamma * p.gamma - 2.0 * p.gamma * g1 + g2;
        const double e3 = std::pow(p.gamma, 3) -
                          3.0 * p.gamma * p.gamma * g1 +
                          3.0 * p.gamma * g2 - g3;
        CHECK(rm.m1 == doctest::Approx(e1).epsilon(1e-10));
        CHECK(rm.m2 == doctest::Approx(e2).epsilon(1e-10));
        CHECK(rm.m3 == doctest::Approx(e3).epsilon(1e-10));
    }
}

TEST_CASE("expected_max closed forms") {
    RwParams p{3.1, 2.2, 0.7};
    CHECK(expected_max(1, p) == doctest::Approx(raw_moments(p).m1).epsilon(1e-13));
    CHECK(expected_max(10, {1.0, 1.0, 0.0}) == doctest::Approx(-0.1).epsilon(1e-13));
    CHECK(expected_max(20, {2.0, 10.0, 0.0}) ==
          doctest::Approx(-1.981663648803006).epsilon(1e-12));
}

TEST_CASE("sampled empirical CDF tracks the analytic CDF") {
    // Kolmogorov-Smirnov at significance 0.01 (critical 1.6276/sqrt(n))
    const std::size_t n = 20000;
    for (double d : {0.5, 2.0}) {
        RwParams p{d, 10.0, 0.0};
        Sample s = sample(n, p, 31337);
        double dks = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = cdf(s.values[i], p);
            dks = std::max(dks, (i + 1.0) / n - f);
            dks = std::max(dks, f - static_cast<double>(i) / n);
        }
        CHECK(dks < 1.6276 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate({0.0, 1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate({1.0, -2.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate({std::nan(""), 1.0, 0.0}), std::invalid_argument);
}

} // TEST_SUITE
