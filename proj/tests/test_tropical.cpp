#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "maxitive/models.hpp"
#include "maxitive/pushforward.hpp"
#include "maxitive/random.hpp"
#include "maxitive/tropical.hpp"

using namespace maxitive;

namespace {

DiscreteDistribution random_maxitive(std::mt19937_64& rng, std::size_t size,
                                     bool with_zero = false) {
    std::vector<std::string> labels;
    std::vector<double> weights;
    for (std::size_t i = 0; i < size; ++i) {
        labels.push_back("x" + std::to_string(i));
        weights.push_back(uniform(rng, 1e-3, 1.0));
    }
    if (with_zero && size > 1) weights[0] = 0.0;
    weights[size / 2] = 1.0;
    return DiscreteDistribution(std::move(labels), std::move(weights),
                                Mode::maxitive, true);
}

// exhaustive walk enumeration: min cost over walks of length <= max_len from
// each node to any node with finite initial cost
std::vector<double> enumerate_paths(const TropicalMatrix& M,
                                    const std::vector<double>& v0, int max_len) {
    const std::size_t n = M.rows;
    std::vector<double> best = v0;
    std::vector<std::size_t> walk;
    // depth-first over all walks starting at `start`
    auto dfs = [&](auto&& self, std::size_t node, double cost, int depth) -> void {
        if (std::isfinite(v0[node]))
            best[walk.front()] = std::min(best[walk.front()], cost + v0[node]);
        if (depth == max_len) return;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::isinf(M.at(node, j))) continue;
            walk.push_back(j);
            self(self, j, cost + M.at(node, j), depth + 1);
            walk.pop_back();
        }
    };
    for (std::size_t s = 0; s < n; ++s) {
        walk.assign(1, s);
        dfs(dfs, s, 0.0, 0);
    }
    return best;
}

}  // namespace

TEST_CASE("from_weights takes the normalized suspects to costs") {
    const auto dist = normalize(models::suspects(Mode::maxitive));
    const auto cm = from_weights(dist);
    CHECK(cm.costs[0] == 0.0);
    CHECK_THAT(cm.costs[1], Catch::Matchers::WithinAbs(std::log(4.0 / 3.0), 1e-15));
    CHECK_THAT(cm.costs[2], Catch::Matchers::WithinAbs(std::log(4.0 / 3.0), 1e-15));
    CHECK(cm.normalized);

    // exp round-trip recovers the weights
    const auto back = to_weights(cm);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK_THAT(back.weights()[i],
                   Catch::Matchers::WithinAbs(dist.weights()[i], 1e-12));
}

TEST_CASE("from_weights edge cases") {
    const DiscreteDistribution with_zero({"a", "b"}, {1.0, 0.0}, Mode::maxitive,
                                         true);
    CHECK(std::isinf(from_weights(with_zero).costs[1]));

    const DiscreteDistribution flat({"a", "b"}, {1.0, 1.0}, Mode::maxitive, true);
    const auto cm = from_weights(flat);
    CHECK(cm.costs == std::vector<double>{0.0, 0.0});

    CHECK_THROWS_AS(from_weights(models::suspects(Mode::additive)),
                    validation_error);
    const DiscreteDistribution over({"a"}, {1.5}, Mode::maxitive);
    CHECK_THROWS_AS(from_weights(over), validation_error);
}

TEST_CASE("tropical Bayes worked examples") {
    const auto flat = CostMeasure::over_labels({"a", "b"}, {0.0, 0.0}, true);
    const auto evidence = CostMeasure::over_labels({"a", "b"}, {0.7, 0.0}, true);
    const auto post = tropical_bayes(flat, evidence);
    CHECK(post.costs == evidence.costs);  // flat prior is the identity

    const auto prior = CostMeasure::over_labels({"a", "b"}, {0.0, 1.0});
    const auto ev2 = CostMeasure::over_labels({"a", "b"}, {2.0, 0.0});
    const auto post2 = tropical_bayes(prior, ev2);
    CHECK(post2.costs == std::vector<double>{1.0, 0.0});
    CHECK(post2.normalized);

    const auto impossible =
        CostMeasure::over_labels({"a", "b"}, {infinite_cost, 0.0});
    const auto post3 = tropical_bayes(prior, impossible);
    CHECK(std::isinf(post3.costs[0]));

    const auto other = CostMeasure::over_labels({"a", "c"}, {0.0, 0.0});
    CHECK_THROWS_AS(tropical_bayes(prior, other), validation_error);

    const auto all_inf_a = CostMeasure::over_labels({"a", "b"}, {infinite_cost, 0.0});
    const auto all_inf_b = CostMeasure::over_labels({"a", "b"}, {0.0, infinite_cost});
    CHECK_THROWS_AS(tropical_bayes(all_inf_a, all_inf_b), validation_error);
}

TEST_CASE("tropical Bayes agrees with the linear-domain round trip") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        const auto prior_w = random_maxitive(rng, 2 + uniform_index(rng, 6));
        const auto ev_w = DiscreteDistribution(
            prior_w.labels(),
            [&] {
                std::vector<double> w;
                for (std::size_t i = 0; i < prior_w.size(); ++i)
                    w.push_back(uniform(rng, 1e-3, 1.0));
                w[0] = 1.0;
                return w;
            }(),
            Mode::maxitive, true);

        const auto tropical_post = tropical_bayes(from_weights(prior_w),
                                                  from_weights(ev_w));

        // independent route: multiply weights, maxitive-normalize, -log
        std::vector<double> product;
        for (std::size_t i = 0; i < prior_w.size(); ++i)
            product.push_back(prior_w.weights()[i] * ev_w.weights()[i]);
        const auto lifted = from_weights(normalize(
            DiscreteDistribution(prior_w.labels(), product, Mode::maxitive)));

        for (std::size_t i = 0; i < lifted.costs.size(); ++i)
            CHECK_THAT(tropical_post.costs[i],
                       Catch::Matchers::WithinAbs(lifted.costs[i], 1e-12));
    }
}

TEST_CASE("tropical Bayes is associative and commutative in the evidence") {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 5);
        auto mk = [&] {
            std::vector<std::string> labels;
            std::vector<double> costs;
            for (std::size_t i = 0; i < n; ++i) {
                labels.push_back("x" + std::to_string(i));
                costs.push_back(uniform(rng, 0.0, 5.0));
            }
            return CostMeasure::over_labels(std::move(labels), std::move(costs));
        };
        const auto prior = mk(), e1 = mk(), e2 = mk();
        const auto left = tropical_bayes(tropical_bayes(prior, e1), e2);
        const auto right = tropical_bayes(tropical_bayes(prior, e2), e1);
        for (std::size_t i = 0; i < n; ++i)
            CHECK_THAT(left.costs[i],
                       Catch::Matchers::WithinAbs(right.costs[i], 1e-12));
    }
}

TEST_CASE("bellman step worked examples") {
    const auto I = TropicalMatrix::identity(3);
    const auto v = CostMeasure::over_labels({"a", "b", "c"}, {1.0, 2.5, 0.0});
    const auto stepped = bellman_step(I, v);
    CHECK(stepped.costs == v.costs);  // tropical identity

    // a +inf row maps to the min over finite entries only
    const TropicalMatrix M(2, 2, {infinite_cost, infinite_cost, 1.0, 2.0});
    const auto v2 = CostMeasure::over_labels({"a", "b"}, {0.0, 0.0});
    const auto out = bellman_step(M, v2);
    CHECK(std::isinf(out.costs[0]));
    CHECK(out.costs[1] == 1.0);

    CHECK_THROWS_AS(bellman_step(TropicalMatrix::identity(4), v),
                    validation_error);
}

TEST_CASE("iterated bellman steps equal path enumeration on the 3-node graph") {
    const auto M = models::bellman_demo_graph();
    const auto v0 = models::bellman_demo_initial();

    CostMeasure v = v0;
    for (int k = 1; k <= 3; ++k) {
        v = bellman_step(M, v);
        const auto expected = enumerate_paths(M, v0.costs, k);
        CHECK(v.costs == expected);  // integer costs: exact
    }
    // a->b->c = 3 beats a->c = 5
    CHECK(v.costs[0] == 3.0);
    CHECK(v.costs[1] == 2.0);
    CHECK(v.costs[2] == 0.0);
}

TEST_CASE("bellman fixed point equals an independent relaxation oracle") {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 5);
        std::vector<double> entries(n * n, infinite_cost);
        for (std::size_t i = 0; i < n; ++i) {
            entries[i * n + i] = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && uniform01(rng) < 0.6)
                    entries[i * n + j] =
                        static_cast<double>(uniform_index(rng, 10));
        }
        const TropicalMatrix M(n, n, entries);
        std::vector<std::string> labels;
        std::vector<double> v0(n, infinite_cost);
        for (std::size_t i = 0; i < n; ++i) labels.push_back("n" + std::to_string(i));
        v0[n - 1] = 0.0;

        const auto sol = bellman_solve(M, CostMeasure::over_labels(labels, v0));
        CHECK(sol.converged);

        // Bellman-Ford relaxation, written independently
        std::vector<double> dist = v0;
        for (std::size_t round = 0; round + 1 < n; ++round)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (!std::isinf(M.at(i, j)) && !std::isinf(dist[j]))
                        dist[i] = std::min(dist[i], M.at(i, j) + dist[j]);
        CHECK(sol.costs.costs == dist);
    }
}

TEST_CASE("profile_cost on the suspects example") {
    const auto dist = normalize(models::suspects(Mode::maxitive));
    const auto cm = from_weights(dist);
    const auto pushed = profile_cost(cm, TransformSpec{models::suspects_hats()});
    REQUIRE(pushed.labels == std::vector<std::string>{"red", "blue"});
    CHECK(pushed.costs[0] == 0.0);
    CHECK_THAT(pushed.costs[1], Catch::Matchers::WithinAbs(std::log(4.0 / 3.0), 1e-15));

    // identity map leaves costs unchanged
    Relabel identity;
    for (const auto& l : cm.labels) identity.map[l] = l;
    CHECK(profile_cost(cm, TransformSpec{identity}).costs == cm.costs);

    // flatness is preserved in the cost domain
    const auto flat = CostMeasure::over_labels({"s1", "s2", "s3"}, {0.4, 0.4, 0.4});
    const auto flat_pushed =
        profile_cost(flat, TransformSpec{models::suspects_hats()});
    for (double c : flat_pushed.costs) CHECK(c == 0.4);
}

TEST_CASE("profile_cost is the -log image of the maxitive pushforward") {
    std::mt19937_64 rng(64);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = random_maxitive(rng, 2 + uniform_index(rng, 8),
                                       trial % 3 == 0);
        Relabel T;
        const std::size_t targets = 1 + uniform_index(rng, 4);
        for (const auto& l : d.labels())
            T.map[l] = "t" + std::to_string(uniform_index(rng, targets));

        const auto via_costs = profile_cost(from_weights(d), TransformSpec{T});
        const auto via_weights = from_weights(pushforward(d, T));
        REQUIRE(via_costs.labels == via_weights.labels);
        for (std::size_t i = 0; i < via_costs.costs.size(); ++i) {
            if (std::isinf(via_weights.costs[i]))
                CHECK(std::isinf(via_costs.costs[i]));
            else
                CHECK_THAT(via_costs.costs[i],
                           Catch::Matchers::WithinAbs(via_weights.costs[i], 1e-12));
        }
    }
}

TEST_CASE("profile_cost projects grid cost measures") {
    std::vector<GridAxis> axes{GridAxis{0, 1, 3}, GridAxis{0, 1, 4}};
    std::vector<double> values(grid_size(axes));
    std::mt19937_64 rng(65);
    for (double& v : values) v = uniform(rng, 0.1, 1.0);
    values[5] = 1.0;
    const GridDensity g(axes, values, Mode::maxitive, true);

    const auto direct = from_weights(pushforward(g, Projection{{0}}));
    const auto via_costs = profile_cost(from_weights(g), TransformSpec{Projection{{0}}});
    REQUIRE(via_costs.costs.size() == direct.costs.size());
    for (std::size_t i = 0; i < direct.costs.size(); ++i)
        CHECK(via_costs.costs[i] == direct.costs[i]);
}

TEST_CASE("round trip weights -> costs -> weights") {
    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = random_maxitive(rng, 1 + uniform_index(rng, 10),
                                       trial % 4 == 0);
        const auto back = to_weights(from_weights(d));
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d.weights()[i] == 0.0)
                CHECK(back.weights()[i] == 0.0);  // +inf <-> 0 is exact
            else
                CHECK_THAT(back.weights()[i],
                           Catch::Matchers::WithinAbs(d.weights()[i], 1e-12));
        }
    }
}
