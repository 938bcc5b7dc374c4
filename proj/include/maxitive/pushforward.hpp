#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "maxitive/distribution.hpp"
#include "maxitive/errors.hpp"
#include "maxitive/grid.hpp"
#include "maxitive/semiring.hpp"

namespace maxitive {

// Labels of product supports are component tuples joined by this separator,
// e.g. "a,1" for (a, 1). Projection on discrete supports splits on it.
inline constexpr char label_separator = ',';

/// Total relabeling of a discrete support (generally non-1-1).
struct Relabel {
    std::map<std::string, std::string> map;  // ordered for deterministic output
};

/// Keep the listed axes (grid) or label components (discrete product).
struct Projection {
    std::vector<int> axes;
};

/// Numeric map R^n -> R^m (m <= n); images are binned into the target grid.
struct NumericMap {
    std::function<std::vector<double>(std::span<const double>)> fn;
    std::vector<GridAxis> target;
    std::string name;  // for manifests and error messages
};

using TransformSpec = std::variant<Relabel, Projection, NumericMap>;

/// Mapping from each target element to the source elements landing on it.
/// Every source element appears in exactly one fiber.
struct FiberIndex {
    std::vector<std::string> target_labels;     // discrete targets only
    std::vector<std::vector<std::size_t>> fibers;
};

namespace detail {

inline std::vector<std::string> split_label(const std::string& label) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : label) {
        if (c == label_separator) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline std::string join_label(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += label_separator;
        out += parts[i];
    }
    return out;
}

}  // namespace detail

/// Fiber index of a relabeling; target labels appear in order of first
/// appearance along the source support.
inline FiberIndex build_fiber_index(const std::vector<std::string>& source_labels,
                                    const Relabel& T) {
    FiberIndex fi;
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < source_labels.size(); ++i) {
        auto it = T.map.find(source_labels[i]);
        if (it == T.map.end())
            throw validation_error("relabel map is not total: missing '" +
                                   source_labels[i] + "'");
        auto [slot, fresh] = pos.emplace(it->second, fi.target_labels.size());
        if (fresh) {
            fi.target_labels.push_back(it->second);
            fi.fibers.emplace_back();
        }
        fi.fibers[slot->second].push_back(i);
    }
    return fi;
}

/// Projection on a discrete product support, expressed as the induced
/// relabeling of component tuples.
inline Relabel projection_as_relabel(const std::vector<std::string>& source_labels,
                                     const Projection& proj) {
    if (proj.axes.empty()) throw validation_error("projection needs at least one axis");
    Relabel r;
    for (const auto& label : source_labels) {
        const auto parts = detail::split_label(label);
        std::vector<std::string> kept;
        for (int a : proj.axes) {
            if (a < 0 || static_cast<std::size_t>(a) >= parts.size())
                throw validation_error("projection axis out of range for label '" +
                                       label + "'");
            kept.push_back(parts[static_cast<std::size_t>(a)]);
        }
        r.map[label] = detail::join_label(kept);
    }
    return r;
}

// ---------------------------------------------------------------------------
// discrete pushforward

/// Image distribution under a relabeling: weight at each target label is the
/// mode's combine over its fiber (sum = marginalization, max = profile).
inline DiscreteDistribution pushforward(const DiscreteDistribution& dist,
                                        const Relabel& T) {
    const FiberIndex fi = build_fiber_index(dist.labels(), T);
    std::vector<double> weights(fi.target_labels.size(), 0.0);
    for (std::size_t t = 0; t < fi.fibers.size(); ++t)
        for (std::size_t s : fi.fibers[t])
            weights[t] = detail::combine_raw(weights[t], dist.weights()[s], dist.mode());
    return DiscreteDistribution(fi.target_labels, std::move(weights), dist.mode(),
                                dist.normalized());
}

inline DiscreteDistribution pushforward(const DiscreteDistribution& dist,
                                        const Projection& proj) {
    return pushforward(dist, projection_as_relabel(dist.labels(), proj));
}

// ---------------------------------------------------------------------------
// grid pushforward

namespace detail {

inline void check_projection_axes(const Projection& proj, std::size_t dim) {
    if (proj.axes.empty()) throw validation_error("projection needs at least one axis");
    std::vector<bool> seen(dim, false);
    for (int a : proj.axes) {
        if (a < 0 || static_cast<std::size_t>(a) >= dim)
            throw validation_error("projection axis out of range");
        if (seen[static_cast<std::size_t>(a)])
            throw validation_error("projection axes must be distinct");
        seen[static_cast<std::size_t>(a)] = true;
    }
}

}  // namespace detail

inline GridDensity pushforward(const GridDensity& g, const Projection& proj) {
    detail::check_projection_axes(proj, g.axes.size());
    std::vector<GridAxis> target_axes;
    for (int a : proj.axes) target_axes.push_back(g.axes[static_cast<std::size_t>(a)]);

    // volume of the dropped axes: additive images integrate them out so the
    // result stays a density
    double dropped_volume = 1.0;
    for (std::size_t d = 0; d < g.axes.size(); ++d) {
        if (std::find(proj.axes.begin(), proj.axes.end(), static_cast<int>(d)) ==
            proj.axes.end())
            dropped_volume *= g.axes[d].spacing();
    }

    std::vector<double> values(grid_size(target_axes), 0.0);
    std::vector<int> idx(g.axes.size());
    std::vector<int> tidx(proj.axes.size());
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        unflatten(g.axes, flat, idx);
        for (std::size_t k = 0; k < proj.axes.size(); ++k)
            tidx[k] = idx[static_cast<std::size_t>(proj.axes[k])];
        const std::size_t tflat = flatten(target_axes, tidx);
        if (g.mode == Mode::additive)
            values[tflat] += g.values[flat] * dropped_volume;
        else
            values[tflat] = std::max(values[tflat], g.values[flat]);
    }
    return GridDensity(std::move(target_axes), std::move(values), g.mode,
                       g.normalized);
}

/// Binned pushforward under a numeric map. Additive mode converts source
/// densities to cell masses and back to target densities (mass is conserved
/// exactly); maxitive mode takes the plain maximum over each bin. Cells the
/// image misses keep weight 0.
inline GridDensity pushforward(const GridDensity& g, const NumericMap& T) {
    if (!T.fn) throw validation_error("numeric map has no function");
    validate_axes(T.target);
    if (T.target.size() > g.axes.size())
        throw validation_error("numeric map target dimension exceeds source");

    const double source_volume = cell_volume(g.axes);
    const double target_volume = cell_volume(T.target);
    std::vector<double> values(grid_size(T.target), 0.0);
    std::vector<int> tidx(T.target.size());
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        const auto x = node_point(g.axes, flat);
        const auto y = T.fn(x);
        if (y.size() != T.target.size())
            throw validation_error("numeric map output dimension mismatch");
        for (std::size_t d = 0; d < y.size(); ++d) {
            const int c = T.target[d].locate(y[d]);
            if (c < 0) {
                std::ostringstream os;
                os << "image point " << y[d] << " outside target box on axis " << d;
                throw validation_error(os.str());
            }
            tidx[d] = c;
        }
        const std::size_t tflat = flatten(T.target, tidx);
        if (g.mode == Mode::additive)
            values[tflat] += g.values[flat] * source_volume / target_volume;
        else
            values[tflat] = std::max(values[tflat], g.values[flat]);
    }
    return GridDensity(T.target, std::move(values), g.mode, g.normalized);
}

inline DiscreteDistribution pushforward(const DiscreteDistribution& dist,
                                        const TransformSpec& T) {
    if (std::holds_alternative<NumericMap>(T))
        throw validation_error("numeric maps apply to grid densities only");
    if (const auto* r = std::get_if<Relabel>(&T)) return pushforward(dist, *r);
    return pushforward(dist, std::get<Projection>(T));
}

inline GridDensity pushforward(const GridDensity& g, const TransformSpec& T) {
    if (std::holds_alternative<Relabel>(T))
        throw validation_error("relabelings apply to discrete distributions only");
    if (const auto* p = std::get_if<Projection>(&T)) return pushforward(g, *p);
    return pushforward(g, std::get<NumericMap>(T));
}

/// Named convenience for pushforward under a coordinate projection:
/// marginalization (additive) or profiling (maxitive).
inline DiscreteDistribution marginalize(const DiscreteDistribution& dist,
                                        const std::vector<int>& axes) {
    return pushforward(dist, Projection{axes});
}

inline GridDensity marginalize(const GridDensity& g, const std::vector<int>& axes) {
    return pushforward(g, Projection{axes});
}

// ---------------------------------------------------------------------------
// set-function likelihood

/// sup of weights over a subset of the support (maxitive mode only).
inline Weight set_likelihood(const DiscreteDistribution& dist,
                             std::span<const std::string> members) {
    if (dist.mode() != Mode::maxitive)
        throw validation_error("set_likelihood requires maxitive mode");
    if (members.empty()) throw validation_error("empty set after resolution");
    double best = 0.0;
    for (const auto& label : members)
        best = std::max(best, dist.weight_of(label));
    return Weight(best);
}

inline Weight set_likelihood(const DiscreteDistribution& dist,
                             std::initializer_list<std::string> members) {
    return set_likelihood(dist, std::span<const std::string>(members.begin(), members.size()));
}

/// Grid form: sup over nodes satisfying the predicate (evaluated pointwise
/// at grid nodes), supporting inequality sets such as {x | T(x) <= t}.
inline Weight set_likelihood(const GridDensity& g,
                             const std::function<bool(std::span<const double>)>& predicate) {
    if (g.mode != Mode::maxitive)
        throw validation_error("set_likelihood requires maxitive mode");
    if (!predicate) throw validation_error("null predicate");
    double best = 0.0;
    bool any = false;
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        const auto x = node_point(g.axes, flat);
        if (predicate(x)) {
            any = true;
            best = std::max(best, g.values[flat]);
        }
    }
    if (!any) throw validation_error("empty set after resolution");
    return Weight(best);
}

// ---------------------------------------------------------------------------
// ignorance audit

/// Flatness of the image of the flat distribution in each mode. The maxitive
/// image of a flat source is flat under any map; the additive image is flat
/// only when all (nonempty) fibers carry equal cardinality/volume.
struct AuditReport {
    bool maxitive_flat = false;
    bool additive_flat = false;
    double maxitive_ratio = 1.0;  // max/min over nonempty-fiber weights
    double additive_ratio = 1.0;
    std::size_t nonempty_fibers = 0;
};

namespace detail {

inline std::pair<double, bool> flatness_ratio(const std::vector<double>& weights) {
    double lo = 0.0, hi = 0.0;
    bool seen = false;
    for (double w : weights) {
        if (w <= 0.0) continue;  // empty fibers / missed cells are not part of the image support
        if (!seen) {
            lo = hi = w;
            seen = true;
        } else {
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
    }
    if (!seen) return {1.0, true};
    return {hi / lo, hi == lo};
}

}  // namespace detail

inline AuditReport ignorance_audit(const std::vector<std::string>& source_labels,
                                   const TransformSpec& T) {
    AuditReport report;
    const std::vector<double> flat(source_labels.size(), 1.0);
    const DiscreteDistribution max_flat(source_labels, flat, Mode::maxitive, true);
    const std::vector<double> unif(source_labels.size(),
                                   1.0 / static_cast<double>(source_labels.size()));
    const DiscreteDistribution add_flat(source_labels, unif, Mode::additive, true);

    const auto max_image = pushforward(max_flat, T);
    const auto add_image = pushforward(add_flat, T);
    std::tie(report.maxitive_ratio, report.maxitive_flat) =
        detail::flatness_ratio(max_image.weights());
    std::tie(report.additive_ratio, report.additive_flat) =
        detail::flatness_ratio(add_image.weights());
    report.nonempty_fibers = max_image.size();
    return report;
}

inline AuditReport ignorance_audit(const std::vector<GridAxis>& source_axes,
                                   const TransformSpec& T) {
    AuditReport report;
    validate_axes(source_axes);
    const std::vector<double> ones(grid_size(source_axes), 1.0);
    const GridDensity max_flat(source_axes, ones, Mode::maxitive, true);
    std::vector<double> unif(grid_size(source_axes), 1.0);
    const double vol = total_mass(GridDensity(source_axes, unif, Mode::additive));
    for (double& v : unif) v /= vol;
    const GridDensity add_flat(source_axes, unif, Mode::additive, true);

    const auto max_image = pushforward(max_flat, T);
    const auto add_image = pushforward(add_flat, T);
    std::tie(report.maxitive_ratio, report.maxitive_flat) =
        detail::flatness_ratio(max_image.values);
    std::tie(report.additive_ratio, report.additive_flat) =
        detail::flatness_ratio(add_image.values);
    std::size_t nonempty = 0;
    for (double v : max_image.values)
        if (v > 0.0) ++nonempty;
    report.nonempty_fibers = nonempty;
    return report;
}

}  // namespace maxitive
