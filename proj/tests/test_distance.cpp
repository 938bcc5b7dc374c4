#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "maxitive/distance.hpp"
#include "maxitive/models.hpp"
#include "maxitive/random.hpp"

using namespace maxitive;

TEST_CASE("preference follows the likelihood ordering") {
    CHECK(compare_weights(0.4, 0.3) == Preference::preferred);
    CHECK(compare_weights(0.3, 0.3) == Preference::equivalent);
    CHECK(compare_weights(std::exp(-5.0), std::exp(-1.0)) ==
          Preference::dispreferred);
    CHECK(compare_weights(0.0, 0.2) == Preference::dispreferred);

    const auto d = models::suspects(Mode::maxitive);
    CHECK(compare(d, "s1", "s2") == Preference::preferred);
    CHECK(compare(d, "s2", "s3") == Preference::equivalent);
}

TEST_CASE("distance examples") {
    CHECK_THAT(weight_distance(1.0, std::exp(-2.0)).value,
               Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK(weight_distance(0.7, 0.7).value == 0.0);

    const auto d = models::suspects(Mode::maxitive);
    CHECK_THAT(likelihood_distance(d, "s1", "s2").value,
               Catch::Matchers::WithinAbs(std::log(4.0 / 3.0), 1e-15));

    CHECK(weight_distance(0.0, 0.5).infinite());
    CHECK_THROWS_AS(weight_distance(0.0, 0.0), validation_error);
}

TEST_CASE("distance laws on random fixtures") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const double wa = uniform(rng, 1e-6, 1.0);
        const double wb = uniform(rng, 1e-6, 1.0);
        const double wc = uniform(rng, 1e-6, 1.0);

        // symmetry is exact: both orders compute the same |difference|
        CHECK(weight_distance(wa, wb) == weight_distance(wb, wa));

        // zero iff equal likelihood values
        CHECK(weight_distance(wa, wa).value == 0.0);
        if (wa != wb) CHECK(weight_distance(wa, wb).value > 0.0);

        // chain additivity along the likelihood ordering
        std::vector<double> sorted{wa, wb, wc};
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        CHECK_THAT(weight_distance(sorted[0], sorted[2]).value,
                   Catch::Matchers::WithinAbs(
                       weight_distance(sorted[0], sorted[1]).value +
                           weight_distance(sorted[1], sorted[2]).value,
                       1e-12));

        // invariance under positive rescaling of L
        const double k = uniform(rng, 0.05, 20.0);
        CHECK_THAT(weight_distance(k * wa, k * wb).value,
                   Catch::Matchers::WithinAbs(weight_distance(wa, wb).value, 1e-12));
    }
}

TEST_CASE("model-based comparison and distance") {
    const auto model = models::gaussian_demo_model();
    const std::vector<double> at_mean{0.5, -0.25};
    const std::vector<double> off{1.5, -0.25};
    CHECK(compare(model, at_mean, off) == Preference::preferred);
    CHECK(compare(model, at_mean, at_mean) == Preference::equivalent);

    // distance equals the log-likelihood gap
    const double expected = model(at_mean) - model(off);
    CHECK_THAT(likelihood_distance(model, at_mean, off).value,
               Catch::Matchers::WithinAbs(expected, 1e-15));

    const std::vector<double> outside{99.0, 0.0};
    CHECK_THROWS_AS(likelihood_distance(model, outside, off), validation_error);
}

TEST_CASE("distance with zero likelihood on one side is infinite") {
    LikelihoodModel model;
    model.dimension = 1;
    model.box = {Interval{-1.0, 1.0}};
    model.log_likelihood = [](std::span<const double> t) {
        return t[0] < 0.0 ? neg_inf_log : -t[0];
    };
    const std::vector<double> neg{-0.5}, neg2{-0.2}, pos{0.5};
    CHECK(likelihood_distance(model, neg, pos).infinite());
    CHECK_THROWS_AS(likelihood_distance(model, neg, neg2), validation_error);
    CHECK(compare(model, neg, pos) == Preference::dispreferred);
}
