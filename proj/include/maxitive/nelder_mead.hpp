#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace maxitive {

struct NelderMeadOptions {
    double xtol = 1e-8;   // simplex extent below which we stop
    double ftol = 1e-10;  // objective spread below which we stop
    int max_iterations = 0;  // 0: 400 * dimension
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex maximization. -inf objective values are legal and
/// act as rejection (constraint violations, zero-likelihood regions).
inline NelderMeadResult nelder_mead_maximize(
    const std::function<double(std::span<const double>)>& objective,
    std::vector<std::vector<double>> simplex, const NelderMeadOptions& opts) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    const std::size_t dim = simplex.empty() ? 0 : simplex[0].size();
    const std::size_t m = simplex.size();  // dim + 1 vertices expected

    std::vector<double> fvals(m);
    for (std::size_t i = 0; i < m; ++i) fvals[i] = objective(simplex[i]);

    NelderMeadResult result;
    if (dim == 0 || m < 2) {
        result.x = simplex.empty() ? std::vector<double>{} : simplex[0];
        result.value = m ? fvals[0] : neg_inf;
        result.converged = true;
        return result;
    }

    const int max_iter =
        opts.max_iterations > 0 ? opts.max_iterations : 400 * static_cast<int>(dim);
    std::vector<std::size_t> order(m);

    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fvals[a] > fvals[b]; });
    };

    std::vector<double> centroid(dim), trial(dim);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        sort_simplex();
        const std::size_t best = order[0], worst = order[m - 1];

        if (fvals[best] == neg_inf) break;  // nothing feasible anywhere

        // convergence: simplex extent and finite objective spread
        double extent = 0.0;
        for (std::size_t i = 1; i < m; ++i)
            for (std::size_t d = 0; d < dim; ++d)
                extent = std::max(extent,
                                  std::abs(simplex[order[i]][d] - simplex[best][d]));
        double spread = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (fvals[i] != neg_inf)
                spread = std::max(spread, fvals[best] - fvals[i]);
        if (extent < opts.xtol && spread < opts.ftol) {
            result.converged = true;
            break;
        }

        // centroid of all but the worst vertex
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i + 1 < m; ++i)
            for (std::size_t d = 0; d < dim; ++d)
                centroid[d] += simplex[order[i]][d];
        for (double& c : centroid) c /= static_cast<double>(m - 1);

        auto blend = [&](double coeff) {
            for (std::size_t d = 0; d < dim; ++d)
                trial[d] = centroid[d] + coeff * (simplex[worst][d] - centroid[d]);
            return objective(trial);
        };

        const double f_reflect = blend(-1.0);
        if (f_reflect > fvals[best]) {
            const std::vector<double> reflected = trial;
            const double f_expand = blend(-2.0);
            if (f_expand > f_reflect) {
                simplex[worst] = trial;
                fvals[worst] = f_expand;
            } else {
                simplex[worst] = reflected;
                fvals[worst] = f_reflect;
            }
            continue;
        }
        const double f_second_worst = fvals[order[m - 2]];
        if (f_reflect > f_second_worst ||
            (f_second_worst == neg_inf && f_reflect > fvals[worst])) {
            simplex[worst] = trial;
            fvals[worst] = f_reflect;
            continue;
        }
        const double f_contract =
            f_reflect > fvals[worst] ? blend(-0.5) : blend(0.5);
        if (f_contract > std::max(f_reflect, fvals[worst])) {
            simplex[worst] = trial;
            fvals[worst] = f_contract;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t i = 1; i < m; ++i) {
            auto& v = simplex[order[i]];
            for (std::size_t d = 0; d < dim; ++d)
                v[d] = simplex[best][d] + 0.5 * (v[d] - simplex[best][d]);
            fvals[order[i]] = objective(v);
        }
    }

    sort_simplex();
    result.x = simplex[order[0]];
    result.value = fvals[order[0]];
    result.iterations = iter;
    if (result.value == neg_inf) result.converged = true;  // fully infeasible region
    return result;
}

/// Axis-aligned initial simplex around `start`, steps clipped into the box.
inline std::vector<std::vector<double>> initial_simplex(
    std::span<const double> start,
    const std::vector<std::pair<double, double>>& box, double relative_step = 0.1) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> simplex(dim + 1,
                                             std::vector<double>(start.begin(), start.end()));
    for (std::size_t d = 0; d < dim; ++d) {
        const double width = box[d].second - box[d].first;
        double step = relative_step * width;
        if (start[d] + step > box[d].second) step = -step;
        simplex[d + 1][d] += step;
    }
    return simplex;
}

}  // namespace maxitive
