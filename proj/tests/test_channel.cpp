#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "netrate/channel.hpp"

using namespace netrate;

namespace {
// E1(x) = -Ei(-x), oracle for the ergodic-capacity closed form
double expint_e1(double x) { return -std::expint(-x); }
}  // namespace

TEST_CASE("success_prob closed form") {
    CHECK(success_prob(0.5, 1.0, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(success_prob(0.0, 1.0, 1.0) == 1.0);
    // R = 30 at unit SNR: threshold 2^60 - 1, astronomically unlikely
    CHECK(success_prob(30.0, 1.0, 1.0) == 0.0);
    CHECK(erasure_prob(0.5, 1.0, 1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("success_prob is monotone in each argument") {
    double prev = 1.0;
    for (int i = 1; i <= 20; ++i) {
        const double p = success_prob(0.2 * i, 10.0, 1.0);
        CHECK(p < prev);
        prev = p;
    }
    CHECK(success_prob(1.0, 20.0, 1.0) > success_prob(1.0, 10.0, 1.0));
    CHECK(success_prob(1.0, 10.0, 1.0) > success_prob(1.0, 10.0, 0.5));
}

TEST_CASE("success_prob rejects bad arguments") {
    CHECK_THROWS_AS(success_prob(-0.1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(success_prob(0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(success_prob(0.5, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("ergodic capacity matches the exponential-integral closed form") {
    for (const double P : {1.0, 10.0, 100.0, 1000.0}) {
        const double x = P;  // sigma2 = 1
        const double oracle =
            std::exp(1.0 / x) * expint_e1(1.0 / x) / (2.0 * std::log(2.0));
        CHECK(ergodic_capacity_csir(P, 1.0) ==
              doctest::Approx(oracle).epsilon(1e-8));
    }
    CHECK(ergodic_capacity_csir(10.0, 1.0) ==
          doctest::Approx(1.453257404207).epsilon(1e-9));
    CHECK(ergodic_capacity_csir(0.0, 1.0) == 0.0);
}

TEST_CASE("ergodic capacity with scaled gain equals scaled power") {
    CHECK(ergodic_capacity_csir(10.0, 0.5) ==
          doctest::Approx(ergodic_capacity_csir(5.0, 1.0)).epsilon(1e-9));
}

TEST_CASE("waterfilling matches the closed-form rate and power budget") {
    // lambda solves (1/l) e^{-l} - E1(l) = P at sigma2 = 1;
    // the rate is then E1(lambda)/(2 ln 2)
    const double lam = 0.07675915642498;
    CHECK(waterfilling_capacity(10.0, 1.0) ==
          doctest::Approx(expint_e1(lam) / (2.0 * std::log(2.0)))
              .epsilon(1e-7));
    CHECK(waterfilling_capacity(10.0, 1.0) ==
          doctest::Approx(1.489710932662).epsilon(1e-8));
    CHECK(waterfilling_capacity(1.0, 1.0) ==
          doctest::Approx(0.51426946).epsilon(1e-6));
}

TEST_CASE("waterfilling dominates ergodic capacity") {
    for (const double P : {1.0, 10.0, 100.0, 1000.0})
        CHECK(waterfilling_capacity(P, 1.0) > ergodic_capacity_csir(P, 1.0));
}
