#pragma once

// maxitive: possibilistic (maxitive) measure theory next to ordinary
// additive probability -- pushforwards under non-1-1 maps in both semirings,
// a numerical profile-likelihood engine, the log-likelihood distance, and a
// tropical (min-plus) cost-measure layer with Bellman chains.

#include "maxitive/distance.hpp"
#include "maxitive/distribution.hpp"
#include "maxitive/errors.hpp"
#include "maxitive/grid.hpp"
#include "maxitive/models.hpp"
#include "maxitive/nelder_mead.hpp"
#include "maxitive/profile.hpp"
#include "maxitive/pushforward.hpp"
#include "maxitive/random.hpp"
#include "maxitive/semiring.hpp"
#include "maxitive/tropical.hpp"
