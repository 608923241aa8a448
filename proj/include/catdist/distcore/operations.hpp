#pragma once

#include "catdist/distcore/categorical.hpp"
#include "catdist/distcore/monotone_function.hpp"
#include "catdist/distcore/support.hpp"

namespace catdist::dist {

// Scales every atom by w. Negative w reverses the atom order so
// the list stays increasing; w == 0 collapses to a single atom at 0.
CategoricalDistribution weighting(const CategoricalDistribution& x, double w);

// Shifts every atom by b.
CategoricalDistribution bias(const CategoricalDistribution& x, double b);

// Distribution of the sum of two independent variables on grids
// with the same spacing. Single-atom operands are compatible with any spacing.
// Throws SpacingMismatch.
CategoricalDistribution convolve(const CategoricalDistribution& x1,
                                 const CategoricalDistribution& x2);

// Clips each atom into the target range and splits its mass
// between the two neighbouring target atoms with the hat-function weights.
CategoricalDistribution project(const CategoricalDistribution& x, const SupportSpec& target);

// Maps atoms through f; masses are unchanged. The result may be
// non-uniform and must be projected before it can be convolved.
CategoricalDistribution apply_function(const CategoricalDistribution& x,
                                       const MonotoneFunction& f);

double expectation(const CategoricalDistribution& x);
double variance(const CategoricalDistribution& x);

// Sum p log(p / max(q, 1e-12)) with 0 log 0 = 0. Throws SupportMismatch.
double kl_divergence(const CategoricalDistribution& p, const CategoricalDistribution& q);

// sqrt(delta * sum_j (F_p(j) - F_q(j))^2). Throws SupportMismatch.
double cramer_distance(const CategoricalDistribution& p, const CategoricalDistribution& q);

// Probability mass of x whose atoms lie outside [target.v_min, target.v_max].
double clipped_mass(const CategoricalDistribution& x, const SupportSpec& target);

}  // namespace catdist::dist
