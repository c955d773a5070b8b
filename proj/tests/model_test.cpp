#include <cmath>
#include <random>

#include <doctest.h>

#include "entcosmo/model.hpp"

using namespace entcosmo;

TEST_CASE("scale factor at the midpoint and in the asymptotic regions") {
    CosmologyParams p(1.0, 1.0, 1.0);
    CHECK(scale_factor(p, 0.0) == doctest::Approx(2.0).epsilon(1e-15));

    // C -> 1 (past) and 1 + 2 eps (future) within 1e-15 once |sigma tau| >= 20
    for (double eps : {0.1, 1.0, 3.0}) {
        for (double sigma : {0.5, 1.0, 10.0}) {
            CosmologyParams q(eps, sigma, 1.0);
            const double T = 20.0 / sigma;
            CHECK(std::fabs(scale_factor(q, -T) - 1.0) < 1e-15);
            CHECK(std::fabs(scale_factor(q, T) - (1.0 + 2.0 * eps)) < 1e-15);
        }
    }
}

TEST_CASE("scale factor is strictly increasing in tau") {
    // grid stays inside |sigma tau| <= 14 where successive C values are still
    // distinguishable in double precision (tanh saturates beyond ~19)
    for (double eps : {0.2, 2.0}) {
        for (double sigma : {0.3, 5.0}) {
            CosmologyParams p(eps, sigma, 0.0);
            double prev = scale_factor(p, -14.0 / sigma);
            for (int i = 1; i <= 400; ++i) {
                const double tau = (-14.0 + 28.0 * i / 400.0) / sigma;
                const double c = scale_factor(p, tau);
                CHECK(c > prev);
                prev = c;
            }
        }
    }
}

TEST_CASE("frequencies: direct substitution examples") {
    {
        const FrequencySet w = frequencies(CosmologyParams(1, 1, 1), ModeSpec(0));
        CHECK(w.omega_in == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(w.omega_out == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
        CHECK(w.omega_plus == doctest::Approx((std::sqrt(3.0) + 1.0) / 2.0).epsilon(1e-15));
        CHECK(w.omega_minus == doctest::Approx((std::sqrt(3.0) - 1.0) / 2.0).epsilon(1e-15));
    }
    {
        // massless: the mass term vanishes and omega_minus is exactly zero
        const FrequencySet w = frequencies(CosmologyParams(2.5, 1, 0), ModeSpec(2));
        CHECK(w.omega_in == 2.0);
        CHECK(w.omega_out == 2.0);
        CHECK(w.omega_plus == 2.0);
        CHECK(w.omega_minus == 0.0);
    }
    {
        // static spacetime: no frequency shift
        const FrequencySet w = frequencies(CosmologyParams(0, 1, 1), ModeSpec(1));
        CHECK(w.omega_in == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(w.omega_out == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(w.omega_minus == 0.0);
    }
}

TEST_CASE("frequency identities on random parameters") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double eps = std::exp(u(rng) * 8.0 - 4.0);
        const double sigma = std::exp(u(rng) * 6.0 - 3.0);
        const double m = std::exp(u(rng) * 8.0 - 4.0);
        const double k = (u(rng) - 0.5) * 20.0;
        CosmologyParams p(eps, sigma, m);
        const FrequencySet w = frequencies(p, ModeSpec(k));

        // omega_out^2 - omega_in^2 = 2 eps m^2 (algebraic identity)
        const double lhs = w.omega_out * w.omega_out - w.omega_in * w.omega_in;
        CHECK(lhs == doctest::Approx(2.0 * eps * m * m).epsilon(1e-13));

        // omega_plus/minus are the half sum/difference
        CHECK(w.omega_plus ==
              doctest::Approx((w.omega_out + w.omega_in) / 2.0).epsilon(1e-14));
        CHECK(w.omega_minus ==
              doctest::Approx((w.omega_out - w.omega_in) / 2.0)
                  .epsilon(1e-10)
                  .scale(w.omega_plus));
        CHECK(w.omega_out >= w.omega_in);
        CHECK(w.omega_minus < w.omega_plus);

        // even in k
        const FrequencySet wm = frequencies(p, ModeSpec(-k));
        CHECK(w.omega_in == wm.omega_in);
        CHECK(w.omega_out == wm.omega_out);
        CHECK(w.omega_minus == wm.omega_minus);
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(frequencies(CosmologyParams(1, 1, 0), ModeSpec(0)), DegenerateMode);
    CHECK_THROWS_AS(CosmologyParams(-0.5, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(CosmologyParams(1, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(CosmologyParams(1, -2, 1), InvalidArgument);
    CHECK_THROWS_AS(CosmologyParams(1, 1, -1), InvalidArgument);
    CHECK_THROWS_AS(ModeSpec(std::nan("")), InvalidArgument);
    CHECK_NOTHROW(CosmologyParams(0, 1, 1));  // static spacetime is valid
    CHECK_NOTHROW(CosmologyParams(1, 1, 0));  // massless field is valid
}
