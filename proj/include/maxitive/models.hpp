#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "maxitive/distribution.hpp"
#include "maxitive/errors.hpp"
#include "maxitive/profile.hpp"
#include "maxitive/pushforward.hpp"
#include "maxitive/tropical.hpp"

namespace maxitive::models {

/// iid Normal(mu, sigma): theta = (mu, sigma), full log-likelihood including
/// constants. Profiling over mu has the closed form
/// (n/2) log(s2(mu_hat) / s2(mu)) with s2(mu) = mean((x_i - mu)^2), attached
/// as the test oracle.
inline LikelihoodModel normal_model(std::vector<double> data, Interval mu_box,
                                    Interval sigma_box) {
    if (data.size() < 2) throw validation_error("normal model needs >= 2 data points");
    const auto n = static_cast<double>(data.size());
    auto mean_sq = [data](double mu) {
        double s = 0.0;
        for (double x : data) s += (x - mu) * (x - mu);
        return s / static_cast<double>(data.size());
    };
    double mu_hat = 0.0;
    for (double x : data) mu_hat += x;
    mu_hat /= n;

    LikelihoodModel model;
    model.dimension = 2;
    model.box = {mu_box, sigma_box};
    model.name = "normal";
    model.log_likelihood = [data, n](std::span<const double> theta) {
        const double mu = theta[0], sigma = theta[1];
        if (sigma <= 0.0) return neg_inf_log;
        double ss = 0.0;
        for (double x : data) ss += (x - mu) * (x - mu);
        return -0.5 * n * std::log(2.0 * std::numbers::pi) - n * std::log(sigma) -
               ss / (2.0 * sigma * sigma);
    };
    model.profile_oracle = [mean_sq, mu_hat, n](double mu) {
        return 0.5 * n * std::log(mean_sq(mu_hat) / mean_sq(mu));
    };
    return model;
}

/// Quadratic log-likelihood -1/2 (theta-m)' A (theta-m) with A positive
/// definite; the linear-combination profile has a closed Schur-complement
/// form -(t - c.m)^2 / (2 c'A^{-1}c).
inline LikelihoodModel gaussian_quadratic(std::vector<double> mean,
                                          std::vector<std::vector<double>> precision,
                                          std::vector<Interval> box) {
    const std::size_t n = mean.size();
    if (precision.size() != n) throw validation_error("precision matrix size mismatch");
    for (const auto& row : precision)
        if (row.size() != n) throw validation_error("precision matrix not square");

    LikelihoodModel model;
    model.dimension = static_cast<int>(n);
    model.box = std::move(box);
    model.name = "gaussian-quadratic";
    model.log_likelihood = [mean, precision, n](std::span<const double> theta) {
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                q += (theta[i] - mean[i]) * precision[i][j] * (theta[j] - mean[j]);
        return -0.5 * q;
    };
    return model;
}

/// Two-parameter logistic response curve with Gaussian errors of known
/// scale; no closed-form profile (optimizer-only exercise).
inline LikelihoodModel logistic_curve(std::vector<double> inputs,
                                      std::vector<double> responses, double sigma,
                                      std::vector<Interval> box) {
    if (inputs.size() != responses.size() || inputs.empty())
        throw validation_error("logistic model data size mismatch");
    if (sigma <= 0.0) throw validation_error("sigma must be positive");
    LikelihoodModel model;
    model.dimension = 2;
    model.box = std::move(box);
    model.name = "logistic";
    model.log_likelihood = [inputs, responses, sigma](std::span<const double> theta) {
        const double a = theta[0], b = theta[1];
        double ss = 0.0;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const double fitted = 1.0 / (1.0 + std::exp(-(a + b * inputs[i])));
            const double r = responses[i] - fitted;
            ss += r * r;
        }
        return -ss / (2.0 * sigma * sigma);
    };
    return model;
}

// ---------------------------------------------------------------------------
// shipped fixtures

/// Three suspects with plausibilities 0.4 / 0.3 / 0.3.
inline DiscreteDistribution suspects(Mode mode) {
    return DiscreteDistribution({"s1", "s2", "s3"}, {0.4, 0.3, 0.3}, mode);
}

/// s1 wore a red hat, s2 and s3 wore blue hats.
inline Relabel suspects_hats() {
    return Relabel{{{"s1", "red"}, {"s2", "blue"}, {"s3", "blue"}}};
}

/// Fixed 20-point sample, mean exactly 1.5, sd about 0.78.
inline const std::vector<double>& normal_demo_data() {
    static const std::vector<double> data{
        1.2559218498036953,   2.2698645913065061, 1.9656289244659588,
        0.70974837485117059,  0.65016353795660997, 0.50030146726245173,
        1.8177735687175729,   0.98711337479690209, 1.0790822078104794,
        1.0341739669787267,   2.4346113087415495,  2.3910940423785285,
        2.2857028831840669,   -0.29270902730776971, 1.3814956514320524,
        2.8292881781080155,   1.1296543745080005,  1.4250623777452898,
        2.2276901100276048,   1.9183382372325872};
    return data;
}

inline LikelihoodModel normal_demo_model() {
    return normal_model(normal_demo_data(), Interval{-1.0, 4.0}, Interval{0.2, 3.0});
}

inline LikelihoodModel gaussian_demo_model() {
    return gaussian_quadratic({0.5, -0.25},
                              {{1.2, -0.4}, {-0.4, 0.8}},
                              {Interval{-6.0, 6.0}, Interval{-6.0, 6.0}});
}

/// Three-node graph with 0-cost self loops; node "c" is the usual target.
///
///   a -> b : 1    a -> c : 5
///   b -> c : 2    b -> a : 1
///   c -> a : 3
inline TropicalMatrix bellman_demo_graph() {
    const double inf = infinite_cost;
    return TropicalMatrix(3, 3,
                          {0.0, 1.0, 5.0,
                           1.0, 0.0, 2.0,
                           3.0, inf, 0.0});
}

inline CostMeasure bellman_demo_initial() {
    return CostMeasure::over_labels({"a", "b", "c"},
                                    {infinite_cost, infinite_cost, 0.0});
}

}  // namespace maxitive::models
