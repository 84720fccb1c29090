#include <doctest.h>

#include <cmath>

#include "pathsplit/estimators.hpp"
#include "pathsplit/rng.hpp"

using namespace pathsplit;
using estimators::ScalarStepStats;

TEST_CASE("l_cond_mean closed-form values") {
    CHECK(estimators::l_cond_mean({1, 0, 0, 1}) == doctest::Approx(1.0 / 30.0).epsilon(1e-14));
    CHECK(estimators::l_cond_mean({1, 0, 1, 1}) == doctest::Approx(19.0 / 30.0).epsilon(1e-14));
}

TEST_CASE("l_cond_mean odd term cancels under a single sign flip") {
    // The n W term is odd under flipping either W or n alone (flipping both
    // leaves it invariant).
    RngStream rng = stream_for(1, 0, 0, 0);
    for (int i = 0; i < 200; ++i) {
        const double h = 0.25 + rng.uniform();
        const double w = rng.normal(std::sqrt(h));
        const double hst = rng.normal(std::sqrt(h / 12.0));
        const double n = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double even = 2.0 * (h * h / 30.0 + 0.6 * h * hst * hst);
        CHECK(estimators::l_cond_mean({h, w, hst, n})
                  + estimators::l_cond_mean({h, -w, hst, n})
              == doctest::Approx(even).epsilon(1e-12));
        CHECK(estimators::l_cond_mean({h, w, hst, n})
                  + estimators::l_cond_mean({h, w, hst, -n})
              == doctest::Approx(even).epsilon(1e-12));
        CHECK(estimators::l_cond_mean({h, -w, hst, -n})
              == doctest::Approx(estimators::l_cond_mean({h, w, hst, n})).epsilon(1e-12));
    }
}

TEST_CASE("l_cond_var closed-form values and scaling") {
    CHECK(estimators::l_cond_var({1, 0, 0, 1})
          == doctest::Approx(11.0 / 25200.0).epsilon(1e-14));
    const double expected = 11.0 / 25200.0 + 1.0 / 720.0 - 1.0 / (384.0 * estimators::kPi)
                          - 1.0 / (320.0 * estimators::kSqrt6Pi);
    CHECK(estimators::l_cond_var({1, 1, 0, 1}) == doctest::Approx(expected).epsilon(1e-13));

    // Brownian scaling: (W, H) ~ sqrt(h) makes the variance scale as h^4.
    RngStream rng = stream_for(2, 0, 0, 0);
    for (int i = 0; i < 100; ++i) {
        const double w = rng.normal();
        const double hst = rng.normal(std::sqrt(1.0 / 12.0));
        const double n = rng.uniform() < 0.5 ? -1.0 : 1.0;
        for (double h : {1e-3, 0.1, 10.0}) {
            const double scaled =
                estimators::l_cond_var({h, std::sqrt(h) * w, std::sqrt(h) * hst, n});
            const double base = estimators::l_cond_var({1.0, w, hst, n});
            CHECK(scaled == doctest::Approx(h * h * h * h * base).epsilon(1e-12));
        }
    }
}

TEST_CASE("int_w2_cond_mean values and the algebraic identity") {
    CHECK(estimators::int_w2_cond_mean({1, 0, 0, 1})
          == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
    CHECK(estimators::int_w2_cond_mean({1, 0, 0, -1})
          == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
    const double expected = 1.0 / 3.0 + 1.0 / 15.0 - 1.0 / (4.0 * estimators::kSqrt6Pi);
    CHECK(estimators::int_w2_cond_mean({1, 1, 0, 1}) == doctest::Approx(expected).epsilon(1e-14));

    RngStream rng = stream_for(3, 0, 0, 0);
    for (int i = 0; i < 500; ++i) {
        const double h = 0.1 + 2.0 * rng.uniform();
        const ScalarStepStats s{h, rng.normal(std::sqrt(h)), rng.normal(std::sqrt(h / 12.0)),
                                rng.uniform() < 0.5 ? -1.0 : 1.0};
        const double lhs = estimators::int_w2_cond_mean(s);
        const double rhs =
            h * s.w * s.w / 3.0 + h * s.w * s.hst + 2.0 * estimators::l_cond_mean(s);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
    }
}

TEST_CASE("k conditional mean and variance") {
    const double inv = 1.0 / (8.0 * estimators::kSqrt6Pi);
    CHECK(estimators::k_cond_mean(1.0, 1.0) == doctest::Approx(inv).epsilon(1e-15));
    CHECK(estimators::k_variance(1.0) == doctest::Approx(1.0 / 720.0).epsilon(1e-15));
    for (double h : {0.01, 1.0, 4.0})
        CHECK(estimators::k_cond_mean(-1.0, h) == -estimators::k_cond_mean(1.0, h));
}

TEST_CASE("epsilon_sign cases") {
    CHECK(estimators::epsilon_sign({1, 1, 0, -1}) == 1.0);
    CHECK(estimators::epsilon_sign({1, 0, 0, 1}) == -1.0);
    CHECK(estimators::epsilon_sign({1, 0, 0, -1}) == 1.0);
}

TEST_CASE("c_hs2 and c_so2 zero-noise values") {
    CHECK(estimators::c_hs2({1, 0, 0, 1}) == doctest::Approx(-std::sqrt(4.0 / 15.0)));
    CHECK(estimators::c_hs2({1, 0, 0, -1}) == doctest::Approx(std::sqrt(4.0 / 15.0)));
    CHECK(estimators::c_so2({1, 0, 0, 1}) == doctest::Approx(-std::sqrt(4.0 / 5.0)));
}

TEST_CASE("c_so2^2 = 3 c_hs2^2 when W = 0") {
    RngStream rng = stream_for(4, 0, 0, 0);
    for (int i = 0; i < 200; ++i) {
        const double h = 0.2 + rng.uniform();
        const ScalarStepStats s{h, 0.0, rng.normal(std::sqrt(h / 12.0)),
                                rng.uniform() < 0.5 ? -1.0 : 1.0};
        const double a = estimators::c_so2(s);
        const double b = estimators::c_hs2(s);
        CHECK(a * a == doctest::Approx(3.0 * b * b).epsilon(1e-12));
    }
}

TEST_CASE("radicands stay nonnegative under Brownian scaling") {
    RngStream rng = stream_for(5, 0, 0, 0);
    double min_hs2 = 1e300, min_so2 = 1e300, min_lvar = 1e300;
    for (double h : {1e-3, 1.0, 10.0}) {
        for (long i = 0; i < 1000000; ++i) {
            const ScalarStepStats s{h, rng.normal(std::sqrt(h)),
                                    rng.normal(std::sqrt(h / 12.0)),
                                    rng.uniform() < 0.5 ? -1.0 : 1.0};
            min_hs2 = std::min(min_hs2, estimators::c_hs2_radicand(s) / h);
            min_so2 = std::min(min_so2, estimators::c_so2_radicand(s) / h);
            min_lvar = std::min(min_lvar, estimators::l_cond_var(s) / (h * h * h * h));
        }
    }
    MESSAGE("minimum scaled radicands: c_hs2 ", min_hs2, ", c_so2 ", min_so2, ", l_cond_var ",
            min_lvar);
    CHECK(min_hs2 >= 0.0);
    CHECK(min_so2 >= 0.0);
    CHECK(min_lvar >= 0.0);
}

TEST_CASE("stt_target values") {
    const double inv = 1.0 / (8.0 * estimators::kSqrt6Pi);
    CHECK(estimators::stt_target({1, 0, 0, 1}) == doctest::Approx(-inv).epsilon(1e-14));
    CHECK(estimators::stt_target({1, 3, 0, 1}) == doctest::Approx(1.0 - inv).epsilon(1e-14));
    // The n-odd part has magnitude h^{5/2} / (8 sqrt(6 pi)).
    for (double h : {0.3, 2.0}) {
        const double odd = 0.5
                         * (estimators::stt_target({h, 0.7, 0.2, 1})
                            - estimators::stt_target({h, 0.7, 0.2, -1}));
        CHECK(std::abs(odd) == doctest::Approx(std::pow(h, 2.5) * inv).epsilon(1e-12));
    }
}
