#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "maxitive/models.hpp"
#include "maxitive/profile.hpp"
#include "maxitive/pushforward.hpp"
#include "maxitive/random.hpp"

using namespace maxitive;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return g;
}

// normalize a closed-form curve over the same grid as the optimizer output
std::vector<double> normalized(const std::vector<double>& values) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : values) peak = std::max(peak, v);
    std::vector<double> out = values;
    for (double& v : out) v -= peak;
    return out;
}

// 2x2 solve by Cramer's rule (independent of anything in the library)
std::vector<double> solve2(const std::vector<std::vector<double>>& A,
                           const std::vector<double>& b) {
    const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    return {(b[0] * A[1][1] - A[0][1] * b[1]) / det,
            (A[0][0] * b[1] - b[0] * A[1][0]) / det};
}

const std::vector<double> quad_mean{0.5, -0.25};
const std::vector<std::vector<double>> quad_precision{{1.2, -0.4}, {-0.4, 0.8}};
const std::vector<double> quad_c{1.0, 0.6};

}  // namespace

TEST_CASE("normal-model profile matches the closed form") {
    const auto model = models::normal_demo_model();
    const auto grid = linspace(1.3, 1.7, 41);
    const auto curve = profile(model, Coordinate{0}, grid);
    REQUIRE(curve.normalized);

    std::vector<double> closed;
    for (double mu : grid) closed.push_back(model.profile_oracle(mu));
    const auto expected = normalized(closed);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK_THAT(curve.log_values[i],
                   Catch::Matchers::WithinAbs(expected[i], 1e-6));

    // peak sits at the sample mean's grid point
    const auto peak = std::max_element(curve.log_values.begin(),
                                       curve.log_values.end());
    CHECK(grid[static_cast<std::size_t>(peak - curve.log_values.begin())] == 1.5);
}

TEST_CASE("identity interest on a 1-d model returns the model itself") {
    LikelihoodModel model;
    model.dimension = 1;
    model.box = {Interval{-2.0, 2.0}};
    model.name = "bump";
    model.log_likelihood = [](std::span<const double> t) {
        return -std::pow(t[0] - 0.4, 4.0);
    };
    const auto grid = linspace(-1.0, 1.0, 21);
    const auto curve = profile(model, Coordinate{0}, grid);
    std::vector<double> direct;
    for (double t : grid) direct.push_back(model({&t, 1}));
    const auto expected = normalized(direct);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(curve.log_values[i] == expected[i]);  // fibers are singletons
}

TEST_CASE("linear-combination profile matches Schur form and dense oracle") {
    const auto model = models::gaussian_demo_model();
    // t grid holds the true peak c.m = 0.35 exactly
    const auto grid = linspace(-0.65, 1.35, 161);

    const auto curve = profile(model, LinearCombination{quad_c}, grid);

    // closed form -(t - c.m)^2 / (2 c'A^{-1}c) via an independent 2x2 solve
    const auto Ainv_c = solve2(quad_precision, quad_c);
    const double gain = quad_c[0] * Ainv_c[0] + quad_c[1] * Ainv_c[1];
    const double t_hat = quad_c[0] * quad_mean[0] + quad_c[1] * quad_mean[1];
    std::vector<double> closed;
    for (double t : grid) closed.push_back(-0.5 * (t - t_hat) * (t - t_hat) / gain);
    const auto expected = normalized(closed);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK_THAT(curve.log_values[i],
                   Catch::Matchers::WithinAbs(expected[i], 1e-6));

    // argmax points satisfy the constraint
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = quad_c[0] * curve.argmax_points[i][0] +
                         quad_c[1] * curve.argmax_points[i][1];
        CHECK_THAT(t, Catch::Matchers::WithinAbs(grid[i], 1e-6));
    }

    const auto oracle =
        grid_profile_oracle(model, LinearCombination{quad_c}, grid, 400);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK_THAT(curve.log_values[i],
                   Catch::Matchers::WithinAbs(oracle.log_values[i], 5e-3));
}

TEST_CASE("3-d profiles match the Schur form in both parameterizations") {
    // A is positive definite with all-nonzero inverse entries
    const std::vector<double> m{0.4, -0.2, 0.9};
    const std::vector<std::vector<double>> A{
        {2.0, 0.3, -0.2}, {0.3, 1.5, 0.4}, {-0.2, 0.4, 1.1}};
    const auto model = models::gaussian_quadratic(
        m, A, std::vector<Interval>(3, Interval{-6.0, 6.0}));

    // independent 3x3 Gaussian elimination
    auto solve3 = [](std::vector<std::vector<double>> M, std::vector<double> b) {
        for (int col = 0; col < 3; ++col) {
            int pivot = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::abs(M[r][col]) > std::abs(M[pivot][col])) pivot = r;
            std::swap(M[col], M[pivot]);
            std::swap(b[col], b[pivot]);
            for (int r = 0; r < 3; ++r) {
                if (r == col) continue;
                const double f = M[r][col] / M[col][col];
                for (int k = 0; k < 3; ++k) M[r][k] -= f * M[col][k];
                b[r] -= f * b[col];
            }
        }
        return std::vector<double>{b[0] / M[0][0], b[1] / M[1][1], b[2] / M[2][2]};
    };

    SECTION("coordinate interest, 2-d nuisance") {
        const auto inv_col = solve3(A, {1.0, 0.0, 0.0});  // e1' A^{-1} e1
        const auto grid = linspace(-0.6, 1.4, 21);
        const auto curve = profile(model, Coordinate{0}, grid);
        std::vector<double> closed;
        for (double t : grid)
            closed.push_back(-0.5 * (t - m[0]) * (t - m[0]) / inv_col[0]);
        const auto expected = normalized(closed);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK_THAT(curve.log_values[i],
                       Catch::Matchers::WithinAbs(expected[i], 1e-6));
    }

    SECTION("linear interest, 2-d null space") {
        const std::vector<double> c{1.0, 0.5, -0.5};
        const auto Ainv_c = solve3(A, c);
        const double gain = c[0] * Ainv_c[0] + c[1] * Ainv_c[1] + c[2] * Ainv_c[2];
        const double t_hat = c[0] * m[0] + c[1] * m[1] + c[2] * m[2];
        const auto grid = linspace(t_hat - 1.0, t_hat + 1.0, 21);
        const auto curve = profile(model, LinearCombination{c}, grid);
        std::vector<double> closed;
        for (double t : grid)
            closed.push_back(-0.5 * (t - t_hat) * (t - t_hat) / gain);
        const auto expected = normalized(closed);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK_THAT(curve.log_values[i],
                       Catch::Matchers::WithinAbs(expected[i], 1e-6));
            const double mapped = c[0] * curve.argmax_points[i][0] +
                                  c[1] * curve.argmax_points[i][1] +
                                  c[2] * curve.argmax_points[i][2];
            CHECK_THAT(mapped, Catch::Matchers::WithinAbs(grid[i], 1e-6));
        }
    }
}

TEST_CASE("cold-start mode matches warm-start results on a well-behaved model") {
    const auto model = models::normal_demo_model();
    const auto grid = linspace(1.4, 1.6, 11);
    ProfileOptions warm, cold;
    cold.warm_start = false;
    const auto a = profile(model, Coordinate{0}, grid, warm);
    const auto b = profile(model, Coordinate{0}, grid, cold);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK_THAT(a.log_values[i],
                   Catch::Matchers::WithinAbs(b.log_values[i], 1e-8));
}

TEST_CASE("profile_to_grid requires uniform spacing") {
    ProfileCurve curve;
    curve.t_grid = {0.0, 0.1, 0.5};
    curve.log_values = {0.0, -1.0, -2.0};
    curve.argmax_points.assign(3, {});
    curve.normalized = true;
    CHECK_THROWS_AS(profile_to_grid(curve), validation_error);
}

TEST_CASE("dense oracle on a 1-d model equals direct evaluation") {
    LikelihoodModel model;
    model.dimension = 1;
    model.box = {Interval{0.0, 1.0}};
    model.log_likelihood = [](std::span<const double> t) {
        return -(t[0] - 0.3) * (t[0] - 0.3);
    };
    const GridAxis axis{0.0, 1.0, 21};
    std::vector<double> grid;
    for (int i = 0; i < 21; ++i) grid.push_back(axis.node(i));
    const auto oracle = grid_profile_oracle(model, Coordinate{0}, grid, 21);
    std::vector<double> direct;
    for (double t : grid) direct.push_back(model({&t, 1}));
    const auto expected = normalized(direct);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(oracle.log_values[i] == expected[i]);
}

TEST_CASE("dense oracle validates the normal-model optimizer at resolution 400") {
    // snug box so the 400-node mu axis is finer than the t cells
    const auto model = models::normal_model(models::normal_demo_data(),
                                            Interval{1.0, 2.0}, Interval{0.4, 1.6});
    const GridAxis mu_axis{1.0, 2.0, 400};
    std::vector<double> grid;
    for (int i = 180; i <= 220; ++i) grid.push_back(mu_axis.node(i));

    const auto curve = profile(model, Coordinate{0}, grid);
    const auto oracle = grid_profile_oracle(model, Coordinate{0}, grid, 400);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK_THAT(curve.log_values[i],
                   Catch::Matchers::WithinAbs(oracle.log_values[i], 5e-3));
}

TEST_CASE("dense oracle rejects dimension above three") {
    std::vector<std::vector<double>> eye(4, std::vector<double>(4, 0.0));
    for (int i = 0; i < 4; ++i) eye[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    const auto model = models::gaussian_quadratic(
        {0, 0, 0, 0}, eye,
        std::vector<Interval>(4, Interval{-1.0, 1.0}));
    CHECK_THROWS_AS(grid_profile_oracle(model, Coordinate{0}, linspace(-1, 1, 5), 8),
                    validation_error);
}

TEST_CASE("positive rescaling leaves the normalized curve unchanged") {
    auto model = models::normal_demo_model();
    const auto grid = linspace(1.35, 1.65, 31);
    ProfileOptions opts;
    opts.xtol = 1e-12;
    opts.ftol = 1e-14;
    const auto base = profile(model, Coordinate{0}, grid, opts);

    auto shifted = model;
    const auto inner = model.log_likelihood;
    shifted.log_likelihood = [inner](std::span<const double> theta) {
        return inner(theta) + 17.3;  // multiply L by e^17.3
    };
    const auto moved = profile(shifted, Coordinate{0}, grid, opts);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK_THAT(moved.log_values[i],
                   Catch::Matchers::WithinAbs(base.log_values[i], 1e-10));
        for (std::size_t d = 0; d < 2; ++d)
            CHECK_THAT(moved.argmax_points[i][d],
                       Catch::Matchers::WithinAbs(base.argmax_points[i][d], 1e-10));
    }
}

TEST_CASE("profile dominates every restriction to the fiber") {
    const auto model = models::normal_demo_model();
    const auto grid = linspace(1.2, 1.8, 13);
    const auto curve = profile(model, Coordinate{0}, grid);
    std::mt19937_64 rng(41);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double raw_profile = curve.log_values[i] + curve.peak_log;
        for (int s = 0; s < 10; ++s) {
            const std::vector<double> theta{grid[i], uniform(rng, 0.2, 3.0)};
            CHECK(raw_profile >= model(theta) - 1e-8);
        }
    }
}

TEST_CASE("fixed seed reproduces curves bit for bit") {
    const auto model = models::gaussian_demo_model();
    const auto grid = linspace(-0.5, 1.2, 18);
    for (bool warm : {true, false}) {
        ProfileOptions opts;
        opts.seed = 99;
        opts.warm_start = warm;
        const auto a = profile(model, LinearCombination{quad_c}, grid, opts);
        const auto b = profile(model, LinearCombination{quad_c}, grid, opts);
        REQUIRE(a.log_values.size() == b.log_values.size());
        CHECK(std::memcmp(a.log_values.data(), b.log_values.data(),
                          a.log_values.size() * sizeof(double)) == 0);
        for (std::size_t i = 0; i < a.argmax_points.size(); ++i)
            CHECK(a.argmax_points[i] == b.argmax_points[i]);
    }
}

TEST_CASE("general-map profile nests with a monotone pushforward") {
    const auto model = models::gaussian_demo_model();
    const auto grid = linspace(-0.65, 1.35, 41);
    const auto curve = profile(model, LinearCombination{quad_c}, grid);
    const auto density = profile_to_grid(curve);

    // affine image of the curve's grid
    NumericMap g;
    g.name = "affine";
    g.fn = [](std::span<const double> t) {
        return std::vector<double>{0.5 * t[0] - 2.0};
    };
    g.target = {GridAxis{0.5 * density.axes[0].lower - 2.0,
                         0.5 * density.axes[0].upper - 2.0,
                         density.axes[0].points}};
    const auto pushed = pushforward(density, g);

    // profile the composite map directly
    GeneralMap composite;
    composite.name = "affine-of-linear";
    composite.fn = [](std::span<const double> theta) {
        return 0.5 * (quad_c[0] * theta[0] + quad_c[1] * theta[1]) - 2.0;
    };
    std::vector<double> image_grid;
    for (double t : grid) image_grid.push_back(0.5 * t - 2.0);
    const auto direct = profile(model, InterestFunction{composite}, image_grid);

    REQUIRE(pushed.values.size() == direct.log_values.size());
    for (std::size_t i = 0; i < direct.log_values.size(); ++i) {
        CHECK_THAT(std::exp(direct.log_values[i]),
                   Catch::Matchers::WithinAbs(pushed.values[i], 1e-5));
        // penalty-path argmax satisfies the constraint tolerance
        const double mapped = composite.fn(direct.argmax_points[i]);
        CHECK_THAT(mapped, Catch::Matchers::WithinAbs(image_grid[i], 1e-6));
    }
}

TEST_CASE("profile_to_grid maps log values to maxitive weights") {
    ProfileCurve curve;
    curve.t_grid = linspace(0.0, 1.0, 5);
    curve.log_values = {0.0, 0.0, 0.0, 0.0, 0.0};
    curve.argmax_points.assign(5, {});
    curve.normalized = true;
    const auto flat = profile_to_grid(curve);
    for (double v : flat.values) CHECK(v == 1.0);
    CHECK(flat.mode == Mode::maxitive);

    curve.log_values = {0.0, -1.0, neg_inf_log, -2.0, -0.5};
    const auto mixed = profile_to_grid(curve);
    CHECK(mixed.values[0] == 1.0);
    CHECK(mixed.values[2] == 0.0);

    curve.normalized = false;
    CHECK_THROWS_AS(profile_to_grid(curve), validation_error);
}

TEST_CASE("normal curve exponentiates to weight one at the mean") {
    const auto model = models::normal_demo_model();
    const auto grid = linspace(1.3, 1.7, 41);
    const auto curve = profile(model, Coordinate{0}, grid);
    const auto density = profile_to_grid(curve);
    CHECK(density.values[20] == 1.0);  // grid point 1.5 = sample mean
    CHECK(density.normalized);
}

TEST_CASE("infeasible targets are rejected") {
    const auto model = models::normal_demo_model();
    CHECK_THROWS_AS(profile(model, Coordinate{0}, {5.0}), validation_error);

    const auto quad = models::gaussian_demo_model();
    CHECK_THROWS_AS(profile(quad, LinearCombination{quad_c}, {100.0}),
                    validation_error);
    CHECK_THROWS_AS(profile(quad, LinearCombination{{0.0, 0.0}}, {0.0}),
                    validation_error);
    CHECK_THROWS_AS(profile(quad, Coordinate{7}, {0.0}), validation_error);

    ProfileOptions bad;
    bad.xtol = -1.0;
    CHECK_THROWS_AS(profile(model, Coordinate{0}, {1.5}, bad), validation_error);
}

TEST_CASE("penalty escalation failure raises optimizer_error") {
    const auto model = models::gaussian_demo_model();
    GeneralMap sumsq;
    sumsq.name = "sumsq";
    sumsq.fn = [](std::span<const double> theta) {
        return theta[0] * theta[0] + theta[1] * theta[1];
    };
    // sum of squares can never equal -1
    CHECK_THROWS_AS(profile(model, InterestFunction{sumsq}, {-1.0}),
                    optimizer_error);
}

TEST_CASE("logistic model profiles without an oracle") {
    const std::vector<double> inputs{-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2, 2.5};
    const std::vector<double> responses{0.05, 0.09, 0.18, 0.32, 0.52,
                                        0.68, 0.82, 0.90, 0.96, 0.97};
    const auto model = models::logistic_curve(
        inputs, responses, 0.05, {Interval{-3.0, 3.0}, Interval{0.1, 5.0}});
    const auto grid = linspace(0.8, 2.2, 15);
    const auto curve = profile(model, Coordinate{1}, grid);
    double peak = neg_inf_log;
    for (double v : curve.log_values) peak = std::max(peak, v);
    CHECK(peak == 0.0);
    // interior maximum: both endpoints strictly below the peak
    CHECK(curve.log_values.front() < -1e-3);
    CHECK(curve.log_values.back() < -1e-3);
}
