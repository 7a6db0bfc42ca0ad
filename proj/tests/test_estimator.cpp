#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pointprob/estimator.hpp"
#include "reference.hpp"

using namespace pointprob;

TEST_CASE("symmetric binomial at the mean") {
    // 100 coin flips: mu = 50, sigma = 5, eta = 12.5, tau = 0.1 exactly.
    const SumModel m({{Bernoulli(0.5), 100}});
    const EstimateResult r = gaussian_point_estimate(m, 50);

    CHECK(r.t == 0.0);
    CHECK(r.tau == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(r.error_term == r.tau * r.tau);
    CHECK(r.estimate == doctest::Approx(0.07978845608028654).epsilon(1e-14));

    REQUIRE(r.epsilon.has_value());
    CHECK(*r.epsilon == doctest::Approx(std::sqrt(8.0 * std::log(10.0)) / 5.0).epsilon(1e-14));
    CHECK(r.flags.epsilon_le_pi);
    CHECK(r.flags.tau_small_enough);     // tau == ceiling counts as inside
    CHECK_FALSE(r.flags.sigma_large_enough);  // variance 25 < 100

    // The true pmf sits within a small multiple of the error term.
    const double exact = static_cast<double>(ref::binomial_pmf(100, 0.5L, 50));
    CHECK(std::fabs(r.estimate - exact) <= 0.025 * r.error_term);
}

TEST_CASE("larger binomial clears every flag") {
    const SumModel m({{Bernoulli(0.5), 1600}});
    const EstimateResult r = gaussian_point_estimate(m, 830);

    CHECK(r.t == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(r.tau == doctest::Approx(0.025).epsilon(1e-14));
    CHECK(r.flags.sigma_large_enough);
    CHECK(r.flags.tau_small_enough);
    CHECK(r.flags.epsilon_le_pi);

    const double want =
        std::exp(-0.5 * 1.5 * 1.5) / (std::sqrt(2.0 * std::numbers::pi) * 20.0);
    CHECK(r.estimate == doctest::Approx(want).epsilon(1e-14));

    const double exact = static_cast<double>(ref::binomial_pmf(1600, 0.5L, 830));
    CHECK(std::fabs(r.estimate - exact) <= 0.025 * r.error_term);
}

TEST_CASE("tau tracks the decomposition, the estimate does not") {
    // One Poisson(400) variable versus 400 unit-rate variables: identical
    // mean and variance, very different third-moment diagnostics.
    const SumModel lumped({{Poisson(400.0), 1}});
    const SumModel split({{Poisson(1.0), 400}});

    const EstimateResult a = gaussian_point_estimate(lumped, 400);
    const EstimateResult b = gaussian_point_estimate(split, 400);

    CHECK(a.estimate == b.estimate);
    CHECK(a.t == 0.0);
    CHECK(a.estimate == doctest::Approx(1.0 / (std::sqrt(2.0 * std::numbers::pi) * 20.0))
                            .epsilon(1e-14));

    CHECK(a.tau > 0.5);                 // single heavy block: diagnostic blows up
    CHECK_FALSE(a.flags.tau_small_enough);
    CHECK(b.tau < 0.1);                 // finely divided: regime restored
    CHECK(b.flags.tau_small_enough);
    CHECK(a.flags.sigma_large_enough);
    CHECK(b.flags.sigma_large_enough);

    const double exact = static_cast<double>(ref::poisson_pmf(400.0L, 400));
    CHECK(std::fabs(b.estimate - exact) <= 0.025 * b.error_term);
}

TEST_CASE("tau at or above one disables the width diagnostic") {
    // A single coin: tau == 1 exactly, epsilon undefined.
    const EstimateResult r = gaussian_point_estimate(SumModel({{Bernoulli(0.5), 1}}), 0);
    CHECK(r.tau == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(r.epsilon.has_value());
    CHECK_FALSE(r.flags.epsilon_le_pi);
    CHECK_FALSE(r.flags.tau_small_enough);
    CHECK(r.t == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(r.estimate ==
          doctest::Approx(std::exp(-0.5) / (std::sqrt(2.0 * std::numbers::pi) * 0.5))
              .epsilon(1e-14));
}

TEST_CASE("degenerate and invalid inputs") {
    CHECK_THROWS_AS(gaussian_point_estimate(SumModel({{Finite({{3, 1.0}}), 5}}), 15),
                    DegenerateModel);

    const SumModel m({{Bernoulli(0.5), 100}});
    CHECK_THROWS_AS(gaussian_point_estimate(m, 50, Thresholds{-1.0, 0.1}), ValidationError);
    CHECK_THROWS_AS(gaussian_point_estimate(m, 50, Thresholds{100.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(gaussian_point_estimate(m, 50, Thresholds{100.0, std::nan("")}),
                    ValidationError);
}

TEST_CASE("custom thresholds move the flags") {
    const SumModel m({{Bernoulli(0.5), 100}});
    const EstimateResult r = gaussian_point_estimate(m, 50, Thresholds{25.0, 0.2});
    CHECK(r.flags.sigma_large_enough);  // 25 >= 25
    CHECK(r.flags.tau_small_enough);
}
