#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace maxitive {

// Uniform doubles are derived from the raw mt19937_64 stream instead of
// std::uniform_real_distribution, whose output is implementation-defined.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    // modulo bias is irrelevant for the small n used here
    return rng() % n;
}

/// Derive an independent stream for sub-task `index` of a seeded run.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    rng.discard(8);
    return rng;
}

/// Latin hypercube sample: `count` points in the box given by per-axis
/// (lower, upper) pairs. Deterministic for a given rng state.
inline std::vector<std::vector<double>> latin_hypercube(
    std::mt19937_64& rng, const std::vector<std::pair<double, double>>& box,
    std::size_t count) {
    const std::size_t dim = box.size();
    std::vector<std::vector<double>> points(count, std::vector<double>(dim));
    std::vector<std::size_t> strata(count);
    for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t i = 0; i < count; ++i) strata[i] = i;
        for (std::size_t i = count; i > 1; --i)
            std::swap(strata[i - 1], strata[uniform_index(rng, i)]);
        const double width = (box[d].second - box[d].first) / static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double u = uniform01(rng);
            points[i][d] = box[d].first + width * (static_cast<double>(strata[i]) + u);
        }
    }
    return points;
}

}  // namespace maxitive
