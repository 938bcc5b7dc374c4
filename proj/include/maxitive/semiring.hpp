#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "maxitive/errors.hpp"

namespace maxitive {

/// Which "addition" governs a distribution and everything derived from it:
/// ordinary sums (probability) or maxima (possibility).
enum class Mode { additive, maxitive };

inline const char* mode_name(Mode m) {
    return m == Mode::additive ? "additive" : "maxitive";
}

inline Mode mode_from_name(const std::string& name) {
    if (name == "additive") return Mode::additive;
    if (name == "maxitive") return Mode::maxitive;
    throw parse_error("unknown mode '" + name + "' (expected 'additive' or 'maxitive')");
}

constexpr double infinite_cost = std::numeric_limits<double>::infinity();

/// A plausibility mass: nonnegative, finite.
struct Weight {
    double value = 0.0;

    Weight() = default;
    explicit Weight(double v) : value(v) {
        if (!std::isfinite(v) || v < 0.0)
            throw validation_error("weight must be finite and >= 0");
    }

    friend bool operator==(Weight a, Weight b) { return a.value == b.value; }
};

/// A negative log-weight in [0, +inf]. +inf corresponds exactly to weight 0.
struct Cost {
    double value = infinite_cost;

    Cost() = default;
    explicit Cost(double v) : value(v) {
        if (std::isnan(v) || v < 0.0)
            throw validation_error("cost must be in [0, +inf]");
    }

    bool infinite() const { return std::isinf(value); }
    friend bool operator==(Cost a, Cost b) { return a.value == b.value; }
};

/// Semiring addition on weights: sum (additive) or max (maxitive).
inline Weight combine(Weight a, Weight b, Mode mode) {
    return mode == Mode::additive ? Weight(a.value + b.value)
                                  : Weight(std::max(a.value, b.value));
}

/// Semiring multiplication (the same in both linear-domain structures).
inline Weight scale(Weight a, Weight b) { return Weight(a.value * b.value); }

/// -log into the cost domain. Defined for weights in [0, 1] so that costs
/// stay nonnegative; 0 maps to +inf, 1 maps to 0.
inline Cost to_cost(Weight w) {
    if (w.value > 1.0)
        throw validation_error("to_cost requires weight <= 1 (normalize first)");
    if (w.value == 0.0) return Cost(infinite_cost);
    return Cost(std::max(0.0, -std::log(w.value)));
}

/// exp(-cost) back into the linear domain; +inf maps to weight 0.
inline Weight to_weight(Cost c) {
    if (c.infinite()) return Weight(0.0);
    return Weight(std::exp(-c.value));
}

/// Cost-domain image of maxitive combine: max on weights is min on costs.
inline Cost cost_combine(Cost a, Cost b) {
    return Cost(std::min(a.value, b.value));
}

/// Cost-domain image of scale: product of weights is sum of costs.
inline Cost cost_scale(Cost a, Cost b) {
    if (a.infinite() || b.infinite()) return Cost(infinite_cost);
    return Cost(a.value + b.value);
}

namespace detail {

// raw-double versions used by distribution internals
inline double combine_raw(double a, double b, Mode mode) {
    return mode == Mode::additive ? a + b : std::max(a, b);
}

}  // namespace detail

}  // namespace maxitive
