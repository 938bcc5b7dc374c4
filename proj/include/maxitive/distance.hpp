#pragma once

#include <cmath>
#include <span>
#include <string>

#include "maxitive/distribution.hpp"
#include "maxitive/errors.hpp"
#include "maxitive/profile.hpp"
#include "maxitive/semiring.hpp"

namespace maxitive {

enum class Preference { preferred, dispreferred, equivalent };

inline const char* preference_name(Preference p) {
    switch (p) {
        case Preference::preferred: return "preferred";
        case Preference::dispreferred: return "dispreferred";
        default: return "equivalent";
    }
}

/// Ordering induced by the likelihood: theta_1 preferred iff L(theta_1) >
/// L(theta_2). Compared in log domain; zero-vs-nonzero yields dispreferred
/// for the zero side.
inline Preference compare_weights(double w1, double w2) {
    if (w1 < 0.0 || w2 < 0.0) throw validation_error("weights must be >= 0");
    if (w1 > w2) return Preference::preferred;
    if (w1 < w2) return Preference::dispreferred;
    return Preference::equivalent;
}

/// |log L(theta_1) - log L(theta_2)|: symmetric, zero iff the likelihood
/// values are equal (a pseudometric on parameters - distinct points with
/// equal likelihood are at distance 0), and additive along monotone chains.
/// Exactly one zero likelihood gives +inf; both zero is undefined.
inline Cost weight_distance(double w1, double w2) {
    if (w1 < 0.0 || w2 < 0.0) throw validation_error("weights must be >= 0");
    if (w1 == 0.0 && w2 == 0.0)
        throw validation_error("likelihood distance undefined for two zero weights");
    if (w1 == 0.0 || w2 == 0.0) return Cost(infinite_cost);
    return Cost(std::abs(std::log(w1) - std::log(w2)));
}

// distribution overloads (labels as parameter points)

inline Preference compare(const DiscreteDistribution& dist, const std::string& a,
                          const std::string& b) {
    return compare_weights(dist.weight_of(a), dist.weight_of(b));
}

inline Cost likelihood_distance(const DiscreteDistribution& dist,
                                const std::string& a, const std::string& b) {
    return weight_distance(dist.weight_of(a), dist.weight_of(b));
}

// model overloads (log-domain parameter points)

namespace detail {

inline double checked_log_likelihood(const LikelihoodModel& model,
                                     std::span<const double> theta) {
    if (theta.size() != static_cast<std::size_t>(model.dimension))
        throw validation_error("parameter point dimension mismatch");
    if (!inside_box(theta, model.box))
        throw validation_error("parameter point outside the model box");
    return model(theta);
}

}  // namespace detail

inline Preference compare(const LikelihoodModel& model, std::span<const double> a,
                          std::span<const double> b) {
    const double la = detail::checked_log_likelihood(model, a);
    const double lb = detail::checked_log_likelihood(model, b);
    if (la > lb) return Preference::preferred;
    if (la < lb) return Preference::dispreferred;
    return Preference::equivalent;
}

inline Cost likelihood_distance(const LikelihoodModel& model,
                                std::span<const double> a,
                                std::span<const double> b) {
    const double la = detail::checked_log_likelihood(model, a);
    const double lb = detail::checked_log_likelihood(model, b);
    if (la == neg_inf_log && lb == neg_inf_log)
        throw validation_error("likelihood distance undefined for two zero likelihoods");
    if (la == neg_inf_log || lb == neg_inf_log) return Cost(infinite_cost);
    return Cost(std::abs(la - lb));
}

}  // namespace maxitive
