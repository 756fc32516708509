#include "doctest.h"

#include "rwfit/io.hpp"
#include "rwfit/mle.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace rwfit;

namespace {

// five-point central difference, O(h^4)
template <typename F>
double diff5(F f, double x, double h) {
    return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) -
            f(x + 2.0 * h)) /
           (12.0 * h);
}

} // namespace

TEST_SUITE("mle") {

TEST_CASE("log_likelihood hand expansions") {
    CHECK(log_likelihood({1.0, 1.0, 0.0}, Sample({-1.0})) ==
          doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(log_likelihood({1.0, 2.0, 0.0}, Sample({-2.0, -4.0})) ==
          doctest::Approx(-2.0 * std::log(2.0) - 3.0).epsilon(1e-13));
}

TEST_CASE("log_likelihood equals the log product of densities") {
    std::mt19937 rng(808);
    std::uniform_real_distribution<double> ud(0.4, 5.0), ub(0.5, 15.0),
        ug(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        RwParams p{ud(rng), ub(rng), ug(rng)};
        Sample s = sample(12, p, 1000 + trial);
        double sum = 0.0;
        for (double x : s.values) sum += std::log(pdf(x, p));
        CHECK(log_likelihood(p, s) ==
              doctest::Approx(sum).epsilon(1e-10).scale(std::abs(sum)));
    }
}

TEST_CASE("points at or above gamma force the sentinel") {
    CHECK(log_likelihood({1.0, 1.0, 0.0}, Sample({-1.0, 0.0})) ==
          -std::numeric_limits<double>::infinity());
    CHECK(log_likelihood({1.0, 1.0, 0.0}, Sample({-1.0, 0.5})) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("score hand values") {
    Score sc = score({1.0, 1.0, 0.0}, Sample({-1.0}));
    CHECK(sc.d_delta == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sc.d_beta == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("score components match finite differences of the log-likelihood") {
    std::mt19937 rng(90210);
    std::uniform_real_distribution<double> ud(0.5, 4.0), ub(1.0, 12.0),
        um(0.05, 2.0);
    int done = 0;
    while (done < 50) {
        RwParams p{ud(rng), ub(rng), 0.0};
        Sample s = sample(5 + (rng() % 36), p, rng());
        // keep gamma clear of max(x) so the gamma stencil stays feasible
        const double margin = um(rng) * p.beta;
        RwParams at{ud(rng), ub(rng), s.max() + margin};

        const Score an = score(at, s);
        const double hd = 1e-4 * at.delta;
        const double hb = 1e-4 * at.beta;
        const double hg = 1e-4 * std::min(margin / 4.0, at.beta);
        const double fd_d = diff5(
            [&](double d) { return log_likelihood({d, at.beta, at.gamma}, s); },
            at.delta, hd);
        const double fd_b = diff5(
            [&](double b) { return log_likelihood({at.delta, b, at.gamma}, s); },
            at.beta, hb);
        const double fd_g = diff5(
            [&](double g) { return log_likelihood({at.delta, at.beta, g}, s); },
            at.gamma, hg);

        const double floor = 1e-3 * static_cast<double>(s.n());
        CHECK(an.d_delta == doctest::Approx(fd_d).epsilon(1e-5).scale(floor));
        CHECK(an.d_beta == doctest::Approx(fd_b).epsilon(1e-5).scale(floor));
        CHECK(an.d_gamma == doctest::Approx(fd_g).epsilon(1e-5).scale(floor));
        ++done;
    }
}

TEST_CASE("large-sample fit recovers the generating parameters") {
    Sample s = sample(5000, {2.0, 10.0, 0.0}, 777);
    EstimationResult r = fit_mle(s);
    CHECK(r.converged);
    CHECK_FALSE(r.boundary_hit);
    CHECK(r.params.gamma > s.max());
    CHECK(std::abs(r.params.delta - 2.0) < 0.1);
    CHECK(std::abs(r.params.beta - 10.0) < 0.3);
    CHECK(std::abs(r.params.gamma - 0.0) < 0.3);
    // frozen from the first verified run of this configuration
    CHECK(r.params.delta == doctest::Approx(2.039951435).epsilon(1e-6));
    CHECK(r.params.beta == doctest::Approx(9.981806818).epsilon(1e-6));
    CHECK(r.params.gamma == doctest::Approx(-0.005372442).epsilon(1e-4));
    REQUIRE(r.log_likelihood.has_value());
    CHECK(*r.log_likelihood ==
          doctest::Approx(log_likelihood(r.params, s)).epsilon(1e-12));
}

TEST_CASE("interior optimum satisfies the score equations") {
    Sample s = sample(5000, {2.0, 10.0, 0.0}, 777);
    EstimationResult r = fit_mle(s);
    const Score sc = score(r.params, s);
    const double n = static_cast<double>(s.n());
    CHECK(std::abs(sc.d_delta) < 1e-3 * n);
    CHECK(std::abs(sc.d_beta) < 1e-3 * n);
    CHECK(std::abs(sc.d_gamma) < 1e-3 * n);
}

TEST_CASE("affine equivariance of the fit") {
    Sample s = sample(60, {1.5, 4.0, 2.0}, 9001);
    EstimationResult base = fit_mle(s);
    const double k = 3.7, c = 11.0;
    std::vector<double> tv;
    for (double x : s.values) tv.push_back(k * x + c);
    EstimationResult moved = fit_mle(Sample(std::move(tv)));
    CHECK(moved.params.delta ==
          doctest::Approx(base.params.delta).epsilon(1e-4));
    CHECK(moved.params.beta ==
          doctest::Approx(k * base.params.beta).epsilon(1e-4));
    CHECK(moved.params.gamma ==
          doctest::Approx(k * base.params.gamma + c).epsilon(1e-4));
}

TEST_CASE("location shift moves gamma only") {
    Sample s = sample(40, {2.5, 3.0, 0.0}, 515);
    EstimationResult base = fit_mle(s);
    std::vector<double> tv;
    for (double x : s.values) tv.push_back(x + 100.0);
    EstimationResult moved = fit_mle(Sample(std::move(tv)));
    CHECK(moved.params.delta ==
          doctest::Approx(base.params.delta).epsilon(1e-4));
    CHECK(moved.params.beta == doctest::Approx(base.params.beta).epsilon(1e-4));
    CHECK(moved.params.gamma ==
          doctest::Approx(base.params.gamma + 100.0).epsilon(1e-4));
}

TEST_CASE("bearing-fatigue data drives the likelihood to the sample maximum") {
    Sample s = read_raw_csv(std::string(RWFIT_TEST_DATA_DIR) +
                            "/bearing_fatigue.csv");
    EstimationResult r = fit_mle(s);
    CHECK(r.boundary_hit);
    CHECK_FALSE(r.notes.empty());
    CHECK(r.params.delta > 0.2);
    CHECK(r.params.delta < 0.4);
    CHECK(r.params.gamma == doctest::Approx(-152.7).epsilon(1e-9));
    CHECK(r.params.gamma > s.max());
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(fit_mle(Sample({1.0, 1.0, 1.0, 1.0})), EstimationError);
    CHECK_THROWS_AS(fit_mle(Sample({1.0, 2.0})), EstimationError);
}

} // TEST_SUITE
