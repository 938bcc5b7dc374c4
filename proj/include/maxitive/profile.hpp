#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "maxitive/distribution.hpp"
#include "maxitive/errors.hpp"
#include "maxitive/grid.hpp"
#include "maxitive/nelder_mead.hpp"
#include "maxitive/random.hpp"
#include "maxitive/semiring.hpp"

namespace maxitive {

constexpr double neg_inf_log = -std::numeric_limits<double>::infinity();

/// Per-axis parameter bounds.
struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};

/// A parametric log-likelihood over a bounded box. eval may return -inf
/// (zero-likelihood regions); it must be finite somewhere in the interior.
/// Evaluators must be safe to call from multiple threads.
struct LikelihoodModel {
    int dimension = 0;
    std::vector<Interval> box;
    std::function<double(std::span<const double>)> log_likelihood;
    std::string name;
    // optional closed-form profile (unnormalized log scale), used by tests
    std::function<double(double)> profile_oracle;

    double operator()(std::span<const double> theta) const {
        return log_likelihood(theta);
    }
};

inline void validate_model(const LikelihoodModel& model) {
    if (model.dimension <= 0) throw validation_error("model dimension must be positive");
    if (model.box.size() != static_cast<std::size_t>(model.dimension))
        throw validation_error("model box size does not match dimension");
    for (const auto& iv : model.box)
        if (!(iv.lower < iv.upper))
            throw validation_error("model box requires lower < upper");
    if (!model.log_likelihood) throw validation_error("model has no evaluator");
}

/// The scalar function of the parameter whose profile is requested.
struct Coordinate {
    int index = 0;
};
struct LinearCombination {
    std::vector<double> coefficients;
};
struct GeneralMap {
    std::function<double(std::span<const double>)> fn;
    std::string name;
};
using InterestFunction = std::variant<Coordinate, LinearCombination, GeneralMap>;

inline double interest_value(const InterestFunction& T, std::span<const double> theta) {
    if (const auto* c = std::get_if<Coordinate>(&T))
        return theta[static_cast<std::size_t>(c->index)];
    if (const auto* lc = std::get_if<LinearCombination>(&T)) {
        double s = 0.0;
        for (std::size_t i = 0; i < lc->coefficients.size(); ++i)
            s += lc->coefficients[i] * theta[i];
        return s;
    }
    return std::get<GeneralMap>(T).fn(theta);
}

struct ProfileOptions {
    int starts = 5;        // 1 warm start + (starts-1) Latin-hypercube starts
    double xtol = 1e-8;
    double ftol = 1e-10;
    double ctol = 1e-6;    // constraint tolerance |T(theta) - t|
    double penalty_initial = 1.0;
    double penalty_growth = 10.0;
    double penalty_max = 1e8;
    std::uint64_t seed = 0;
    bool warm_start = true;  // sequential; false = independent (parallel) cold starts
    int max_iterations = 0;  // per Nelder-Mead run; 0 = auto
};

/// log L_p(t) over a user-supplied t grid, argmax per point, normalized so
/// the curve maximum is 0. start_spread records the per-point dispersion of
/// the multi-start optima (a diagnostic for disconnected fibers).
struct ProfileCurve {
    std::vector<double> t_grid;
    std::vector<double> log_values;
    std::vector<std::vector<double>> argmax_points;
    bool normalized = false;
    double peak_log = 0.0;  // raw curve maximum removed by normalization
    std::vector<double> start_spread;
};

namespace detail {

inline bool inside_box(std::span<const double> x, const std::vector<Interval>& box,
                       double slack = 0.0) {
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double pad = slack * (1.0 + box[d].upper - box[d].lower);
        if (x[d] < box[d].lower - pad || x[d] > box[d].upper + pad) return false;
    }
    return true;
}

inline void clamp_to_box(std::vector<double>& x, const std::vector<Interval>& box) {
    for (std::size_t d = 0; d < x.size(); ++d)
        x[d] = std::clamp(x[d], box[d].lower, box[d].upper);
}

inline std::vector<std::pair<double, double>> box_as_pairs(
    const std::vector<Interval>& box) {
    std::vector<std::pair<double, double>> p;
    p.reserve(box.size());
    for (const auto& iv : box) p.emplace_back(iv.lower, iv.upper);
    return p;
}

// Orthonormal basis of the hyperplane {x | c.x = 0} via the Householder
// reflection taking c/|c| to -sign(c0) e0; columns 1..n-1 of H.
inline std::vector<std::vector<double>> nullspace_basis(const std::vector<double>& c) {
    const std::size_t n = c.size();
    double norm = 0.0;
    for (double v : c) norm += v * v;
    norm = std::sqrt(norm);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = c[i] / norm;
    const double s = u[0] >= 0.0 ? 1.0 : -1.0;
    std::vector<double> v = u;
    v[0] += s;
    double vv = 0.0;
    for (double x : v) vv += x * x;
    std::vector<std::vector<double>> basis;  // basis[j] = H e_{j+1}
    for (std::size_t j = 1; j < n; ++j) {
        std::vector<double> col(n, 0.0);
        col[j] = 1.0;
        const double coeff = 2.0 * v[j] / vv;
        for (std::size_t i = 0; i < n; ++i) col[i] -= coeff * v[i];
        basis.push_back(std::move(col));
    }
    return basis;
}

struct MultiStartOutcome {
    std::vector<double> x;
    double value = neg_inf_log;
    int converged_starts = 0;
    double spread = 0.0;
};

// Run Nelder-Mead from every start and keep the best maximum.
inline MultiStartOutcome multi_start_maximize(
    const std::function<double(std::span<const double>)>& objective,
    const std::vector<std::vector<double>>& starts,
    const std::vector<std::pair<double, double>>& step_box,
    const NelderMeadOptions& nm_opts) {
    MultiStartOutcome out;
    double worst_finite = std::numeric_limits<double>::infinity();
    for (const auto& start : starts) {
        auto result = nelder_mead_maximize(
            objective, initial_simplex(start, step_box), nm_opts);
        if (result.converged) ++out.converged_starts;
        if (result.value > out.value || out.x.empty()) {
            out.value = result.value;
            out.x = result.x;
        }
        if (result.value != neg_inf_log)
            worst_finite = std::min(worst_finite, result.value);
    }
    if (out.value != neg_inf_log && std::isfinite(worst_finite))
        out.spread = out.value - worst_finite;
    return out;
}

}  // namespace detail

/// Strictly increasing check + uniform spacing (used for binning grids).
inline double uniform_spacing(const std::vector<double>& t_grid) {
    if (t_grid.size() < 2)
        throw validation_error("t grid needs at least two points");
    const double h = (t_grid.back() - t_grid.front()) /
                     static_cast<double>(t_grid.size() - 1);
    if (!(h > 0.0)) throw validation_error("t grid must be strictly increasing");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double step = t_grid[i] - t_grid[i - 1];
        if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw validation_error("t grid must be uniformly spaced");
    }
    return h;
}

namespace detail {

struct PointResult {
    double log_value = neg_inf_log;
    std::vector<double> argmax;
    double spread = 0.0;
};

// Supremum over the box-truncated fiber {theta : theta_k = t}.
inline PointResult profile_point_coordinate(const LikelihoodModel& model,
                                            int index, double t,
                                            const std::vector<double>* warm,
                                            const ProfileOptions& opts,
                                            std::uint64_t point_id) {
    const std::size_t n = static_cast<std::size_t>(model.dimension);
    const std::size_t k = static_cast<std::size_t>(index);
    if (t < model.box[k].lower || t > model.box[k].upper) {
        std::ostringstream os;
        os << "t=" << t << " outside box of coordinate " << index;
        throw validation_error(os.str());
    }
    PointResult res;
    if (n == 1) {  // fibers are singletons
        res.log_value = model({&t, 1});
        res.argmax = {t};
        return res;
    }

    std::vector<Interval> nuisance_box;
    for (std::size_t d = 0; d < n; ++d)
        if (d != k) nuisance_box.push_back(model.box[d]);
    const auto nuisance_pairs = detail::box_as_pairs(nuisance_box);

    std::vector<double> theta(n);
    theta[k] = t;
    auto objective = [&](std::span<const double> z) {
        if (!detail::inside_box(z, nuisance_box)) return neg_inf_log;
        for (std::size_t d = 0, j = 0; d < n; ++d)
            if (d != k) theta[d] = z[j++];
        return model(theta);
    };

    std::vector<std::vector<double>> starts;
    if (warm && warm->size() == n) {
        std::vector<double> z;
        for (std::size_t d = 0; d < n; ++d)
            if (d != k) z.push_back((*warm)[d]);
        detail::clamp_to_box(z, nuisance_box);
        starts.push_back(std::move(z));
    } else {
        std::vector<double> center;
        for (const auto& iv : nuisance_box)
            center.push_back(0.5 * (iv.lower + iv.upper));
        starts.push_back(std::move(center));
    }
    if (opts.starts > 1) {
        auto rng = substream(opts.seed, point_id);
        for (auto& p : latin_hypercube(rng, nuisance_pairs,
                                       static_cast<std::size_t>(opts.starts - 1)))
            starts.push_back(std::move(p));
    }

    NelderMeadOptions nm{opts.xtol, opts.ftol, opts.max_iterations};
    auto out = detail::multi_start_maximize(objective, starts, nuisance_pairs, nm);
    if (out.converged_starts == 0 && out.value != neg_inf_log) {
        std::ostringstream os;
        os << "no start converged at t=" << t << " (best value " << out.value
           << ", " << starts.size() << " starts)";
        throw optimizer_error(os.str());
    }
    res.log_value = out.value;
    res.argmax.assign(n, 0.0);
    res.argmax[k] = t;
    for (std::size_t d = 0, j = 0; d < n; ++d)
        if (d != k) res.argmax[d] = out.x.empty() ? 0.0 : out.x[j++];
    res.spread = out.spread;
    return res;
}

// Supremum over {theta : c.theta = t} via null-space parameterization.
inline PointResult profile_point_linear(const LikelihoodModel& model,
                                        const std::vector<double>& c, double t,
                                        const std::vector<double>* warm,
                                        const ProfileOptions& opts,
                                        std::uint64_t point_id) {
    const std::size_t n = static_cast<std::size_t>(model.dimension);
    if (c.size() != n) throw validation_error("coefficient vector length mismatch");
    double c_norm2 = 0.0;
    for (double v : c) c_norm2 += v * v;
    if (c_norm2 == 0.0) throw validation_error("coefficient vector must be nonzero");

    // exact image of the box under c.theta
    double t_lo = 0.0, t_hi = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        t_lo += std::min(c[d] * model.box[d].lower, c[d] * model.box[d].upper);
        t_hi += std::max(c[d] * model.box[d].lower, c[d] * model.box[d].upper);
    }
    if (t < t_lo || t > t_hi) {
        std::ostringstream os;
        os << "t=" << t << " outside the image [" << t_lo << ", " << t_hi
           << "] of the box";
        throw validation_error(os.str());
    }

    PointResult res;
    if (n == 1) {
        std::vector<double> theta{t / c[0]};
        res.log_value = model(theta);
        res.argmax = std::move(theta);
        return res;
    }

    // particular solution and orthonormal fiber basis
    std::vector<double> theta0(n);
    for (std::size_t d = 0; d < n; ++d) theta0[d] = t * c[d] / c_norm2;
    const auto basis = detail::nullspace_basis(c);

    auto onto_hyperplane = [&](std::vector<double> x) {
        double cx = 0.0;
        for (std::size_t d = 0; d < n; ++d) cx += c[d] * x[d];
        const double shift = (t - cx) / c_norm2;
        for (std::size_t d = 0; d < n; ++d) x[d] += shift * c[d];
        return x;
    };
    auto to_z = [&](const std::vector<double>& x) {
        std::vector<double> z(n - 1, 0.0);
        for (std::size_t j = 0; j + 1 < n; ++j)
            for (std::size_t d = 0; d < n; ++d)
                z[j] += basis[j][d] * (x[d] - theta0[d]);
        return z;
    };
    auto to_theta = [&](std::span<const double> z) {
        std::vector<double> x = theta0;
        for (std::size_t j = 0; j + 1 < n; ++j)
            for (std::size_t d = 0; d < n; ++d) x[d] += z[j] * basis[j][d];
        return x;
    };

    std::vector<double> eval_buffer(n);
    auto objective = [&](std::span<const double> z) {
        auto x = to_theta(z);
        // allow a hair of slack at the box edge, then evaluate on the clamp
        if (!detail::inside_box(x, model.box, 1e-9)) return neg_inf_log;
        detail::clamp_to_box(x, model.box);
        return model(x);
    };

    // feasible starts: project candidates onto the fiber hyperplane
    std::vector<std::vector<double>> starts;
    auto consider = [&](const std::vector<double>& candidate) {
        auto x = onto_hyperplane(candidate);
        if (detail::inside_box(x, model.box, 1e-9))
            starts.push_back(to_z(x));
    };
    if (warm && warm->size() == n) consider(*warm);
    std::vector<double> center(n);
    for (std::size_t d = 0; d < n; ++d)
        center[d] = 0.5 * (model.box[d].lower + model.box[d].upper);
    if (starts.empty()) consider(center);
    auto rng = substream(opts.seed, point_id);
    const auto box_pairs = detail::box_as_pairs(model.box);
    for (const auto& p : latin_hypercube(rng, box_pairs,
                                         static_cast<std::size_t>(
                                             std::max(1, opts.starts - 1) + 4))) {
        if (static_cast<int>(starts.size()) >= opts.starts) break;
        consider(p);
    }
    if (starts.empty()) {
        // alternating projection onto box and hyperplane from the center
        auto x = center;
        for (int it = 0; it < 200; ++it) {
            x = onto_hyperplane(x);
            detail::clamp_to_box(x, model.box);
        }
        auto proj = onto_hyperplane(x);
        if (detail::inside_box(proj, model.box, 1e-9)) {
            starts.push_back(to_z(proj));
        } else {
            std::ostringstream os;
            os << "no feasible point found on the fiber c.theta=" << t
               << " inside the box";
            throw validation_error(os.str());
        }
    }

    double max_width = 0.0;
    for (const auto& iv : model.box) max_width = std::max(max_width, iv.upper - iv.lower);
    const std::vector<std::pair<double, double>> z_steps(
        n - 1, {-0.5 * max_width, 0.5 * max_width});

    NelderMeadOptions nm{opts.xtol, opts.ftol, opts.max_iterations};
    auto out = detail::multi_start_maximize(objective, starts, z_steps, nm);
    if (out.converged_starts == 0 && out.value != neg_inf_log) {
        std::ostringstream os;
        os << "no start converged at t=" << t;
        throw optimizer_error(os.str());
    }
    auto theta_best = to_theta(out.x);
    detail::clamp_to_box(theta_best, model.box);
    res.log_value = out.value;
    res.argmax = std::move(theta_best);
    res.spread = out.spread;
    return res;
}

// Supremum over {theta : f(theta) = t} by quadratic penalty escalation.
inline PointResult profile_point_general(const LikelihoodModel& model,
                                         const GeneralMap& map, double t,
                                         const std::vector<double>* warm,
                                         const ProfileOptions& opts,
                                         std::uint64_t point_id) {
    const std::size_t n = static_cast<std::size_t>(model.dimension);
    const auto box_pairs = detail::box_as_pairs(model.box);
    NelderMeadOptions nm{opts.xtol, opts.ftol, opts.max_iterations};

    std::vector<double> current;
    if (warm && warm->size() == n) {
        current = *warm;
    } else {
        for (const auto& iv : model.box)
            current.push_back(0.5 * (iv.lower + iv.upper));
    }
    detail::clamp_to_box(current, model.box);

    auto rng = substream(opts.seed, point_id);
    std::vector<std::vector<double>> extra_starts;
    if (opts.starts > 1)
        extra_starts = latin_hypercube(rng, box_pairs,
                                       static_cast<std::size_t>(opts.starts - 1));

    double best_violation = std::numeric_limits<double>::infinity();
    PointResult res;
    for (double rho = opts.penalty_initial; rho <= opts.penalty_max;
         rho *= opts.penalty_growth) {
        auto objective = [&](std::span<const double> x) {
            if (!detail::inside_box(x, model.box)) return neg_inf_log;
            const double raw = model(x);
            if (raw == neg_inf_log) return neg_inf_log;
            const double r = map.fn(x) - t;
            return raw - rho * r * r;
        };
        std::vector<std::vector<double>> starts{current};
        for (const auto& s : extra_starts) starts.push_back(s);
        auto out = detail::multi_start_maximize(objective, starts, box_pairs, nm);
        if (out.value == neg_inf_log) continue;  // escalate and retry
        current = out.x;
        const double violation = std::abs(map.fn(current) - t);
        best_violation = std::min(best_violation, violation);
        if (violation <= opts.ctol) {
            res.log_value = model(current);
            res.argmax = current;
            res.spread = out.spread;
            return res;
        }
    }
    std::ostringstream os;
    os << "penalty escalation failed at t=" << t << " (best |T(theta)-t|="
       << best_violation << ", ctol=" << opts.ctol << ")";
    throw optimizer_error(os.str());
}

inline PointResult profile_point(const LikelihoodModel& model,
                                 const InterestFunction& T, double t,
                                 const std::vector<double>* warm,
                                 const ProfileOptions& opts, std::uint64_t point_id) {
    if (const auto* c = std::get_if<Coordinate>(&T)) {
        if (c->index < 0 || c->index >= model.dimension)
            throw validation_error("coordinate index out of range");
        return profile_point_coordinate(model, c->index, t, warm, opts, point_id);
    }
    if (const auto* lc = std::get_if<LinearCombination>(&T))
        return profile_point_linear(model, lc->coefficients, t, warm, opts, point_id);
    return profile_point_general(model, std::get<GeneralMap>(T), t, warm, opts,
                                 point_id);
}

}  // namespace detail

/// Profile likelihood over t_grid: for each t, the supremum of the model's
/// log-likelihood over the box-truncated fiber {theta : T(theta) = t},
/// computed by multi-start Nelder-Mead (coordinate and null-space
/// parameterizations where the fiber is explicit, quadratic penalty
/// escalation otherwise). Sequential warm-start mode by default; cold-start
/// mode (opts.warm_start = false) computes grid points independently and in
/// parallel. Both modes are deterministic for a fixed seed.
inline ProfileCurve profile(const LikelihoodModel& model, const InterestFunction& T,
                            const std::vector<double>& t_grid,
                            const ProfileOptions& opts = {}) {
    validate_model(model);
    if (t_grid.empty()) throw validation_error("empty t grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw validation_error("t grid must be strictly increasing");
    if (opts.starts < 1) throw validation_error("starts must be >= 1");
    if (!(opts.xtol > 0.0) || !(opts.ftol > 0.0) || !(opts.ctol > 0.0))
        throw validation_error("tolerances must be positive");

    const std::size_t npts = t_grid.size();
    std::vector<detail::PointResult> results(npts);

    if (opts.warm_start) {
        const std::vector<double>* warm = nullptr;
        for (std::size_t i = 0; i < npts; ++i) {
            results[i] = detail::profile_point(model, T, t_grid[i], warm, opts, i);
            if (!results[i].argmax.empty() && results[i].log_value != neg_inf_log)
                warm = &results[i].argmax;
        }
    } else {
        const unsigned workers = std::min<unsigned>(
            std::max(1u, std::thread::hardware_concurrency()),
            static_cast<unsigned>(npts));
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto run_range = [&](unsigned worker) {
            for (std::size_t i = worker; i < npts; i += workers) {
                try {
                    results[i] =
                        detail::profile_point(model, T, t_grid[i], nullptr, opts, i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run_range, w);
        run_range(0);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    ProfileCurve curve;
    curve.t_grid = t_grid;
    curve.log_values.reserve(npts);
    curve.argmax_points.reserve(npts);
    curve.start_spread.reserve(npts);
    double peak = neg_inf_log;
    for (auto& r : results) {
        peak = std::max(peak, r.log_value);
        curve.log_values.push_back(r.log_value);
        curve.argmax_points.push_back(std::move(r.argmax));
        curve.start_spread.push_back(r.spread);
    }
    curve.peak_log = peak;
    if (peak != neg_inf_log)
        for (double& v : curve.log_values)
            if (v != neg_inf_log) v -= peak;
    curve.normalized = true;
    return curve;
}

/// Reinterpret a normalized profile curve as a 1-d maxitive grid density
/// (t points become cell midpoints), so pushforward and set operations
/// apply to profiling results.
inline GridDensity profile_to_grid(const ProfileCurve& curve) {
    if (!curve.normalized)
        throw validation_error("profile_to_grid requires a normalized curve");
    const double h = uniform_spacing(curve.t_grid);
    GridAxis axis{curve.t_grid.front() - 0.5 * h, curve.t_grid.back() + 0.5 * h,
                  static_cast<int>(curve.t_grid.size())};
    std::vector<double> values;
    values.reserve(curve.log_values.size());
    for (double lv : curve.log_values)
        values.push_back(lv == neg_inf_log ? 0.0 : std::exp(lv));
    return GridDensity({axis}, std::move(values), Mode::maxitive, true);
}

/// Independent brute-force realization of the profile: evaluate the model on
/// a dense box grid (resolution nodes per axis, dimension <= 3), bin nodes
/// by T into the t cells, and take the max per bin. Used to validate
/// profile() in tests.
inline ProfileCurve grid_profile_oracle(const LikelihoodModel& model,
                                        const InterestFunction& T,
                                        const std::vector<double>& t_grid,
                                        int resolution) {
    validate_model(model);
    if (model.dimension > 3)
        throw validation_error("dense oracle supports dimension <= 3 only");
    if (resolution < 2) throw validation_error("resolution must be >= 2");
    const double h = uniform_spacing(t_grid);
    const GridAxis t_axis{t_grid.front() - 0.5 * h, t_grid.back() + 0.5 * h,
                          static_cast<int>(t_grid.size())};

    std::vector<GridAxis> axes;
    for (const auto& iv : model.box)
        axes.push_back(GridAxis{iv.lower, iv.upper, resolution});

    const std::size_t npts = t_grid.size();
    ProfileCurve curve;
    curve.t_grid = t_grid;
    curve.log_values.assign(npts, neg_inf_log);
    curve.argmax_points.assign(npts, {});

    const std::size_t total = grid_size(axes);
    for (std::size_t flat = 0; flat < total; ++flat) {
        const auto x = node_point(axes, flat);
        const double tval = interest_value(T, x);
        const int cell = t_axis.locate(tval);
        if (cell < 0) continue;
        const double lv = model(x);
        auto& slot = curve.log_values[static_cast<std::size_t>(cell)];
        if (lv > slot) {
            slot = lv;
            curve.argmax_points[static_cast<std::size_t>(cell)] = x;
        }
    }

    double peak = neg_inf_log;
    for (double v : curve.log_values) peak = std::max(peak, v);
    curve.peak_log = peak;
    if (peak != neg_inf_log)
        for (double& v : curve.log_values)
            if (v != neg_inf_log) v -= peak;
    curve.normalized = true;
    return curve;
}

}  // namespace maxitive
