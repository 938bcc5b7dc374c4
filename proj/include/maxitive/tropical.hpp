#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "maxitive/distribution.hpp"
#include "maxitive/errors.hpp"
#include "maxitive/grid.hpp"
#include "maxitive/pushforward.hpp"
#include "maxitive/semiring.hpp"

namespace maxitive {

/// Negative log-plausibilities over a labeled or gridded support, min-plus
/// normalized (min cost 0) when `normalized`. The log-domain image of a
/// maxitive distribution.
struct CostMeasure {
    std::vector<std::string> labels;  // discrete support; empty when gridded
    std::vector<GridAxis> axes;       // grid support; empty when discrete
    std::vector<double> costs;        // entries in [0, +inf]
    bool normalized = false;

    bool discrete() const { return !labels.empty(); }

    static CostMeasure over_labels(std::vector<std::string> labels,
                                   std::vector<double> costs,
                                   bool normalized = false) {
        CostMeasure cm;
        cm.labels = std::move(labels);
        cm.costs = std::move(costs);
        cm.normalized = normalized;
        if (cm.labels.empty()) throw validation_error("empty support");
        if (cm.labels.size() != cm.costs.size())
            throw validation_error("labels/costs size mismatch");
        cm.validate();
        return cm;
    }

    static CostMeasure over_grid(std::vector<GridAxis> axes,
                                 std::vector<double> costs,
                                 bool normalized = false) {
        CostMeasure cm;
        cm.axes = std::move(axes);
        cm.costs = std::move(costs);
        cm.normalized = normalized;
        validate_axes(cm.axes);
        if (cm.costs.size() != grid_size(cm.axes))
            throw validation_error("costs size does not match grid");
        cm.validate();
        return cm;
    }

    void validate() const {
        for (double c : costs)
            if (std::isnan(c) || c < 0.0)
                throw validation_error("costs must be in [0, +inf]");
    }

    double min_cost() const {
        double m = infinite_cost;
        for (double c : costs) m = std::min(m, c);
        return m;
    }
};

/// Transition costs of a Bellman chain (the tropical analogue of a Markov
/// chain's transition matrix). Entries in [0, +inf].
struct TropicalMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> entries;  // row-major

    TropicalMatrix() = default;
    TropicalMatrix(std::size_t r, std::size_t c, std::vector<double> e)
        : rows(r), cols(c), entries(std::move(e)) {
        if (entries.size() != rows * cols)
            throw validation_error("matrix entries size mismatch");
        for (double v : entries)
            if (std::isnan(v) || v < 0.0)
                throw validation_error("matrix entries must be in [0, +inf]");
    }

    double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

    static TropicalMatrix identity(std::size_t n) {
        std::vector<double> e(n * n, infinite_cost);
        for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 0.0;
        return TropicalMatrix(n, n, std::move(e));
    }
};

/// Cost view of a maxitive distribution: cost = -log(weight) elementwise.
/// Requires weights <= 1 (normalize first); weight 0 maps to cost +inf.
inline CostMeasure from_weights(const DiscreteDistribution& dist) {
    if (dist.mode() != Mode::maxitive)
        throw validation_error("from_weights requires maxitive mode");
    std::vector<double> costs;
    costs.reserve(dist.size());
    for (double w : dist.weights()) costs.push_back(to_cost(Weight(w)).value);
    return CostMeasure::over_labels(dist.labels(), std::move(costs),
                                    dist.normalized());
}

inline CostMeasure from_weights(const GridDensity& g) {
    if (g.mode != Mode::maxitive)
        throw validation_error("from_weights requires maxitive mode");
    std::vector<double> costs;
    costs.reserve(g.values.size());
    for (double v : g.values) costs.push_back(to_cost(Weight(v)).value);
    return CostMeasure::over_grid(g.axes, std::move(costs), g.normalized);
}

/// Inverse view: weight = exp(-cost).
inline DiscreteDistribution to_weights(const CostMeasure& cm) {
    if (!cm.discrete())
        throw validation_error("to_weights requires a labeled cost measure");
    std::vector<double> weights;
    weights.reserve(cm.costs.size());
    for (double c : cm.costs) weights.push_back(to_weight(Cost(c)).value);
    return DiscreteDistribution(cm.labels, std::move(weights), Mode::maxitive,
                                cm.normalized);
}

namespace detail {

inline void require_same_support(const CostMeasure& a, const CostMeasure& b) {
    if (a.discrete() != b.discrete())
        throw validation_error("cost measure support kinds differ");
    if (a.discrete()) {
        if (a.labels != b.labels)
            throw validation_error("cost measure supports differ");
    } else {
        if (a.axes.size() != b.axes.size())
            throw validation_error("cost measure grids differ");
        for (std::size_t d = 0; d < a.axes.size(); ++d)
            if (a.axes[d].lower != b.axes[d].lower ||
                a.axes[d].upper != b.axes[d].upper ||
                a.axes[d].points != b.axes[d].points)
                throw validation_error("cost measure grids differ");
    }
}

}  // namespace detail

/// Renormalize so the minimum cost is exactly 0 (the tropical analogue of
/// dividing by the normalizing constant).
inline CostMeasure tropical_normalize(CostMeasure cm) {
    const double m = cm.min_cost();
    if (std::isinf(m)) throw validation_error("all-infinite cost measure");
    for (double& c : cm.costs) {
        c -= m;
        if (c < 0.0) c = 0.0;  // guard rounding
    }
    cm.normalized = true;
    return cm;
}

/// Tropical Bayes: posterior cost = prior cost + evidence cost, renormalized
/// to minimum 0. Infinite cost (impossibility) absorbs.
inline CostMeasure tropical_bayes(const CostMeasure& prior,
                                  const CostMeasure& evidence) {
    detail::require_same_support(prior, evidence);
    CostMeasure posterior = prior;
    for (std::size_t i = 0; i < posterior.costs.size(); ++i)
        posterior.costs[i] = cost_scale(Cost(posterior.costs[i]),
                                        Cost(evidence.costs[i])).value;
    return tropical_normalize(std::move(posterior));
}

/// One Bellman value-iteration step: (M (.) v)_i = min_j (M_ij + v_j).
inline CostMeasure bellman_step(const TropicalMatrix& M, const CostMeasure& v) {
    if (M.cols != v.costs.size() || M.rows != v.costs.size())
        throw validation_error("matrix/vector dimension mismatch");
    CostMeasure out = v;
    out.normalized = false;
    for (std::size_t i = 0; i < M.rows; ++i) {
        double best = infinite_cost;
        for (std::size_t j = 0; j < M.cols; ++j) {
            const double mij = M.at(i, j);
            const double vj = v.costs[j];
            if (std::isinf(mij) || std::isinf(vj)) continue;
            best = std::min(best, mij + vj);
        }
        out.costs[i] = best;
    }
    return out;
}

struct BellmanSolution {
    CostMeasure costs;
    int iterations = 0;
    bool converged = false;
};

/// Iterate bellman_step to a fixed point (exact equality). With nonnegative
/// costs and a zero diagonal this is value iteration for single-target
/// shortest paths.
inline BellmanSolution bellman_solve(const TropicalMatrix& M, const CostMeasure& v0,
                                     int max_iterations = 0) {
    if (max_iterations <= 0)
        max_iterations = 10 * static_cast<int>(std::max<std::size_t>(M.rows, 1));
    BellmanSolution sol{v0, 0, false};
    for (int k = 0; k < max_iterations; ++k) {
        CostMeasure next = bellman_step(M, sol.costs);
        ++sol.iterations;
        if (next.costs == sol.costs.costs) {
            sol.converged = true;
            sol.costs = std::move(next);
            return sol;
        }
        sol.costs = std::move(next);
    }
    return sol;
}

/// Profile in the cost domain: target cost at t = min of costs over the
/// fiber. Exactly -log of the maxitive pushforward of exp(-cost), since
/// -log is a decreasing bijection (min of -logs picks the same element as
/// max of weights).
inline CostMeasure profile_cost(const CostMeasure& cm, const TransformSpec& T) {
    if (cm.discrete()) {
        if (std::holds_alternative<NumericMap>(T))
            throw validation_error("numeric maps apply to grid supports only");
        const Relabel relabel = std::holds_alternative<Relabel>(T)
                                    ? std::get<Relabel>(T)
                                    : projection_as_relabel(cm.labels,
                                                            std::get<Projection>(T));
        const FiberIndex fi = build_fiber_index(cm.labels, relabel);
        std::vector<double> costs(fi.target_labels.size(), infinite_cost);
        for (std::size_t t = 0; t < fi.fibers.size(); ++t)
            for (std::size_t s : fi.fibers[t])
                costs[t] = std::min(costs[t], cm.costs[s]);
        return CostMeasure::over_labels(fi.target_labels, std::move(costs),
                                        cm.normalized);
    }
    if (!std::holds_alternative<Projection>(T))
        throw validation_error("grid cost measures support projections only");
    const auto& proj = std::get<Projection>(T);
    detail::check_projection_axes(proj, cm.axes.size());
    std::vector<GridAxis> target_axes;
    for (int a : proj.axes) target_axes.push_back(cm.axes[static_cast<std::size_t>(a)]);
    std::vector<double> costs(grid_size(target_axes), infinite_cost);
    std::vector<int> idx(cm.axes.size());
    std::vector<int> tidx(proj.axes.size());
    for (std::size_t flat = 0; flat < cm.costs.size(); ++flat) {
        unflatten(cm.axes, flat, idx);
        for (std::size_t k = 0; k < proj.axes.size(); ++k)
            tidx[k] = idx[static_cast<std::size_t>(proj.axes[k])];
        const std::size_t tflat = flatten(target_axes, tidx);
        costs[tflat] = std::min(costs[tflat], cm.costs[flat]);
    }
    return CostMeasure::over_grid(std::move(target_axes), std::move(costs),
                                  cm.normalized);
}

}  // namespace maxitive
