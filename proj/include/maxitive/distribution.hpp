#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "maxitive/errors.hpp"
#include "maxitive/grid.hpp"
#include "maxitive/random.hpp"
#include "maxitive/semiring.hpp"

namespace maxitive {

inline constexpr double normalization_tolerance = 1e-12;

/// Finite outcome -> weight map tagged with the semiring mode that governs
/// every distribution derived from it.
///
/// The `normalized` flag is caller-asserted at construction (so that
/// deliberately inconsistent fixtures can be built for the axiom checker);
/// normalize() always sets it truthfully.
class DiscreteDistribution {
public:
    DiscreteDistribution(std::vector<std::string> labels,
                         std::vector<double> weights, Mode mode,
                         bool normalized = false)
        : labels_(std::move(labels)),
          weights_(std::move(weights)),
          mode_(mode),
          normalized_(normalized) {
        if (labels_.empty()) throw validation_error("empty support");
        if (labels_.size() != weights_.size())
            throw validation_error("labels/weights size mismatch");
        bool any_positive = false;
        for (double w : weights_) {
            if (!std::isfinite(w) || w < 0.0)
                throw validation_error("weights must be finite and >= 0");
            any_positive = any_positive || w > 0.0;
        }
        if (!any_positive) throw validation_error("all-zero distribution");
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (!index_.emplace(labels_[i], i).second)
                throw validation_error("duplicate label '" + labels_[i] + "'");
        }
    }

    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& weights() const { return weights_; }
    Mode mode() const { return mode_; }
    bool normalized() const { return normalized_; }
    std::size_t size() const { return labels_.size(); }

    std::size_t index_of(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end())
            throw validation_error("unknown label '" + label + "'");
        return it->second;
    }

    bool contains(const std::string& label) const {
        return index_.count(label) != 0;
    }

    double weight_of(const std::string& label) const {
        return weights_[index_of(label)];
    }

    /// Argmax label; ties resolve to the first attaining element in support
    /// order (reporting only, the max itself is unambiguous).
    const std::string& argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < weights_.size(); ++i)
            if (weights_[i] > weights_[best]) best = i;
        return labels_[best];
    }

private:
    std::vector<std::string> labels_;
    std::vector<double> weights_;
    Mode mode_;
    bool normalized_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Weights on the nodes of an axis-aligned rectangular grid, row-major
/// (last axis fastest). Additive-mode values are densities; totals are
/// midpoint Riemann sums over the cells.
struct GridDensity {
    std::vector<GridAxis> axes;
    std::vector<double> values;
    Mode mode = Mode::maxitive;
    bool normalized = false;

    GridDensity(std::vector<GridAxis> axes_, std::vector<double> values_,
                Mode mode_, bool normalized_ = false)
        : axes(std::move(axes_)), values(std::move(values_)), mode(mode_),
          normalized(normalized_) {
        validate_axes(axes);
        if (values.size() != grid_size(axes))
            throw validation_error("grid values size does not match axes");
        bool any_positive = false;
        for (double v : values) {
            if (!std::isfinite(v) || v < 0.0)
                throw validation_error("grid values must be finite and >= 0");
            any_positive = any_positive || v > 0.0;
        }
        if (!any_positive) throw validation_error("all-zero grid density");
    }

    std::size_t size() const { return values.size(); }
    std::vector<double> point(std::size_t flat) const { return node_point(axes, flat); }
};

// ---------------------------------------------------------------------------
// set evaluation

/// Measure of a subset of the support: max of member weights (maxitive) or
/// their sum (additive). The empty set has measure 0 in both modes.
inline Weight measure_of(const DiscreteDistribution& dist,
                         std::span<const std::string> members) {
    double acc = 0.0;
    for (const auto& label : members)
        acc = detail::combine_raw(acc, dist.weight_of(label), dist.mode());
    return Weight(acc);
}

inline Weight measure_of(const DiscreteDistribution& dist,
                         std::initializer_list<std::string> members) {
    return measure_of(dist, std::span<const std::string>(members.begin(), members.size()));
}

inline double total_mass(const GridDensity& g) {
    double s = 0.0;
    for (double v : g.values) s += v;
    return s * cell_volume(g.axes);
}

// ---------------------------------------------------------------------------
// normalization

/// Maxitive: divide by the max (poss(Omega) = 1). Additive: divide by the
/// total mass (prob(Omega) = 1). Idempotent.
inline DiscreteDistribution normalize(const DiscreteDistribution& dist) {
    double denom = 0.0;
    if (dist.mode() == Mode::maxitive) {
        for (double w : dist.weights()) denom = std::max(denom, w);
    } else {
        for (double w : dist.weights()) denom += w;
    }
    if (denom <= 0.0) throw validation_error("all-zero distribution");
    std::vector<double> scaled = dist.weights();
    for (double& w : scaled) w /= denom;
    return DiscreteDistribution(dist.labels(), std::move(scaled), dist.mode(), true);
}

inline GridDensity normalize(const GridDensity& g) {
    double denom = 0.0;
    if (g.mode == Mode::maxitive) {
        for (double v : g.values) denom = std::max(denom, v);
    } else {
        denom = total_mass(g);
    }
    if (denom <= 0.0) throw validation_error("all-zero grid density");
    std::vector<double> scaled = g.values;
    for (double& v : scaled) v /= denom;
    return GridDensity(g.axes, std::move(scaled), g.mode, true);
}

// ---------------------------------------------------------------------------
// axiom checking

struct LawResult {
    bool pass = true;
    std::string counterexample;  // empty when pass
};

struct AxiomReport {
    LawResult empty_law;
    LawResult full_law;
    LawResult union_law;
    std::uint64_t pairs_checked = 0;
    bool exhaustive = false;

    bool all_pass() const {
        return empty_law.pass && full_law.pass && union_law.pass;
    }
};

namespace detail {

// subset measures via bitmask; n <= 63
inline double mask_measure(const DiscreteDistribution& d, std::uint64_t mask) {
    double acc = 0.0;
    const auto& w = d.weights();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (mask & (1ULL << i)) acc = combine_raw(acc, w[i], d.mode());
    return acc;
}

inline std::string mask_to_string(const DiscreteDistribution& d, std::uint64_t mask) {
    std::string s = "{";
    for (std::size_t i = 0; i < d.size(); ++i)
        if (mask & (1ULL << i)) {
            if (s.size() > 1) s += ",";
            s += d.labels()[i];
        }
    return s + "}";
}

inline bool union_law_holds(const DiscreteDistribution& d, std::uint64_t a,
                            std::uint64_t b, std::string& counterexample) {
    const double ma = mask_measure(d, a);
    const double mb = mask_measure(d, b);
    const double mu = mask_measure(d, a | b);
    bool ok;
    if (d.mode() == Mode::maxitive) {
        ok = mu == std::max(ma, mb);  // max introduces no rounding: exact
    } else {
        ok = std::abs(mu - (ma + mb)) <= normalization_tolerance;
    }
    if (!ok) {
        std::ostringstream os;
        os << "A=" << mask_to_string(d, a) << " B=" << mask_to_string(d, b)
           << ": measure(A u B)=" << mu << " vs combined " << ma << ", " << mb;
        counterexample = os.str();
    }
    return ok;
}

}  // namespace detail

/// Verify the elementary measure axioms on a normalized distribution:
/// the empty-set law, the full-set law, and the union law -- exact over
/// arbitrary pairs in maxitive mode, within 1e-12 over disjoint pairs in
/// additive mode. Exhausts all pairs for supports of size <= 8, otherwise
/// samples `trials` random pairs.
inline AxiomReport check_axioms(const DiscreteDistribution& dist,
                                std::uint64_t trials, std::uint64_t seed) {
    if (!dist.normalized())
        throw validation_error("check_axioms requires a normalized distribution");
    const std::size_t n = dist.size();
    if (n > 63) throw validation_error("check_axioms supports at most 63 outcomes");

    AxiomReport report;
    const std::uint64_t full = (n == 63) ? ~0ULL : ((1ULL << n) - 1);

    if (detail::mask_measure(dist, 0) != 0.0) {
        report.empty_law.pass = false;
        report.empty_law.counterexample = "measure(empty) != 0";
    }
    const double m_full = detail::mask_measure(dist, full);
    if (std::abs(m_full - 1.0) > normalization_tolerance) {
        report.full_law.pass = false;
        std::ostringstream os;
        os << "measure(Omega)=" << m_full << " != 1";
        report.full_law.counterexample = os.str();
    }

    auto check_pair = [&](std::uint64_t a, std::uint64_t b) {
        ++report.pairs_checked;
        std::string ce;
        if (!detail::union_law_holds(dist, a, b, ce) && report.union_law.pass) {
            report.union_law.pass = false;
            report.union_law.counterexample = ce;
        }
    };

    if (n <= 8) {
        report.exhaustive = true;
        for (std::uint64_t a = 0; a <= full; ++a) {
            if (dist.mode() == Mode::maxitive) {
                for (std::uint64_t b = 0; b <= full; ++b) check_pair(a, b);
            } else {
                // disjoint pairs only: B ranges over subsets of the complement
                const std::uint64_t comp = full & ~a;
                std::uint64_t b = 0;
                while (true) {
                    check_pair(a, b);
                    if (b == comp) break;
                    b = (b - comp) & comp;  // next subset of comp
                }
            }
        }
    } else {
        std::mt19937_64 rng(seed);
        for (std::uint64_t t = 0; t < trials; ++t) {
            const std::uint64_t r1 = rng() & full;
            const std::uint64_t r2 = rng() & full;
            if (dist.mode() == Mode::maxitive) {
                check_pair(r1, r2);
            } else {
                check_pair(r1 & ~r2, r2 & ~r1);
            }
        }
    }
    return report;
}

}  // namespace maxitive
