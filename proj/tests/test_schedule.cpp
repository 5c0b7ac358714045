#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "freqdiff/schedule.hpp"

using namespace freqdiff;

TEST_CASE("linear schedule hits both endpoints exactly") {
    DiffusionSchedule s = make_schedule(1000, 1e-4, 0.02);
    REQUIRE(s.T == 1000);
    CHECK(s.beta[0] == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(s.beta[999] == doctest::Approx(0.02).epsilon(1e-12));
    for (int t = 1; t < s.T; ++t) CHECK(s.beta[t] >= s.beta[t - 1]);
}

TEST_CASE("alpha and alpha_bar satisfy their defining identities") {
    DiffusionSchedule s = make_schedule(200, 1e-4, 0.02);
    double prod = 1.0;
    for (int t = 0; t < s.T; ++t) {
        CHECK(s.alpha[t] == doctest::Approx(1.0 - s.beta[t]).epsilon(1e-15));
        prod *= s.alpha[t];
        CHECK(s.alpha_bar[t] == doctest::Approx(prod).epsilon(1e-12));
        if (t > 0) CHECK(s.alpha_bar[t] < s.alpha_bar[t - 1]);
    }
}

TEST_CASE("two-step constant schedule gives the squared product") {
    double beta = 0.07;
    DiffusionSchedule s = make_schedule(2, beta, beta);
    CHECK(s.alpha_bar[1] == doctest::Approx((1 - beta) * (1 - beta)).epsilon(1e-15));
}

TEST_CASE("ten constant steps of 0.1 accumulate to 0.9^10") {
    DiffusionSchedule s = make_schedule(10, 0.1, 0.1);
    CHECK(s.alpha_bar[9] == doctest::Approx(std::pow(0.9, 10)).epsilon(1e-12));
    CHECK(s.alpha_bar[9] == doctest::Approx(0.34867844).epsilon(1e-7));
}

TEST_CASE("invalid schedule parameters are rejected") {
    CHECK_THROWS_AS(make_schedule(1, 1e-4, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(100, 0.02, 1e-4), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(100, 0.0, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(100, 1e-4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(100, -0.1, 0.02), std::invalid_argument);
}

TEST_CASE("strided subsequence keeps endpoints and copies alpha_bar verbatim") {
    DiffusionSchedule s = make_schedule(200, 1e-4, 0.02);
    for (int stride : {1, 3, 10, 50, 199, 1000}) {
        StridedSchedule st = make_strided(s, stride);
        REQUIRE(st.steps.size() == st.alpha_bar.size());
        REQUIRE(st.steps.size() >= 2);
        CHECK(st.steps.front() == 0);
        CHECK(st.steps.back() == s.T - 1);
        for (std::size_t i = 0; i < st.steps.size(); ++i) {
            if (i > 0) CHECK(st.steps[i] > st.steps[i - 1]);
            // exact copy, not a recomputation
            CHECK(st.alpha_bar[i] == s.alpha_bar[st.steps[i]]);
        }
    }
}

TEST_CASE("stride 1 visits every step") {
    DiffusionSchedule s = make_schedule(50, 1e-3, 0.01);
    StridedSchedule st = make_strided(s, 1);
    REQUIRE(static_cast<int>(st.steps.size()) == s.T);
    for (int t = 0; t < s.T; ++t) CHECK(st.steps[t] == t);
}

TEST_CASE("bad strides are rejected") {
    DiffusionSchedule s = make_schedule(50, 1e-3, 0.01);
    CHECK_THROWS_AS(make_strided(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_strided(s, -3), std::invalid_argument);
}
