#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "maxitive/errors.hpp"

namespace maxitive {

/// One axis of a rectangular grid: `points` equal cells spanning
/// [lower, upper], values attached to the cell midpoints.
struct GridAxis {
    double lower = 0.0;
    double upper = 1.0;
    int points = 2;

    double spacing() const { return (upper - lower) / points; }
    double node(int i) const { return lower + (i + 0.5) * spacing(); }

    /// Index of the cell containing x; the closed upper edge belongs to the
    /// last cell. Returns -1 when x lies outside [lower, upper].
    int locate(double x) const {
        if (x < lower || x > upper) return -1;
        int i = static_cast<int>((x - lower) / spacing());
        if (i >= points) i = points - 1;
        return i;
    }
};

inline void validate_axes(const std::vector<GridAxis>& axes) {
    if (axes.empty()) throw validation_error("grid needs at least one axis");
    for (const auto& a : axes) {
        if (!(a.lower < a.upper))
            throw validation_error("grid axis requires lower < upper");
        if (a.points < 2) throw validation_error("grid axis requires points >= 2");
    }
}

inline std::size_t grid_size(const std::vector<GridAxis>& axes) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(a.points);
    return n;
}

inline double cell_volume(const std::vector<GridAxis>& axes) {
    double v = 1.0;
    for (const auto& a : axes) v *= a.spacing();
    return v;
}

// Row-major layout: the last axis varies fastest.
inline void unflatten(const std::vector<GridAxis>& axes, std::size_t flat,
                      std::span<int> out) {
    for (std::size_t d = axes.size(); d-- > 0;) {
        const auto p = static_cast<std::size_t>(axes[d].points);
        out[d] = static_cast<int>(flat % p);
        flat /= p;
    }
}

inline std::size_t flatten(const std::vector<GridAxis>& axes,
                           std::span<const int> idx) {
    std::size_t flat = 0;
    for (std::size_t d = 0; d < axes.size(); ++d)
        flat = flat * static_cast<std::size_t>(axes[d].points) +
               static_cast<std::size_t>(idx[d]);
    return flat;
}

inline std::vector<double> node_point(const std::vector<GridAxis>& axes,
                                      std::size_t flat) {
    std::vector<int> idx(axes.size());
    unflatten(axes, flat, idx);
    std::vector<double> x(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) x[d] = axes[d].node(idx[d]);
    return x;
}

}  // namespace maxitive
