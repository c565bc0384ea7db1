// Composite trapezoid quadrature on age grids, cumulative hazards, and
// exponentially damped integrals evaluated without a per-node exp() call.
#pragma once

#include <span>
#include <vector>

#include "agepde/grid.hpp"

namespace agepde {

// Trapezoid value of the tabulated function; linear in f, exact for affine f.
double integrate(const AgeFunction& f);
double integrate(const AgeGrid& grid, std::span<const double> values);

// Trapezoid of the product f*g (both on the same grid).
double integrate_product(const AgeFunction& f, const AgeFunction& g);

// Trapezoid of f(a) * exp(-lambda*a). Uses blockwise geometric recurrence:
// exp(-lambda*da) is applied multiplicatively inside fixed-size blocks with
// a fresh exp() at each block start, which keeps the drift below ~1e-13
// while avoiding n exp() calls per evaluation.
double integrate_decayed(const AgeGrid& grid, std::span<const double> values, double lambda);

// Prefix trapezoid of a rate: H(0) = 0, H nondecreasing for k >= 0.
AgeFunction cumulative_hazard(const AgeFunction& k);
std::vector<double> cumulative_trapezoid(const AgeGrid& grid, std::span<const double> values);

// Suffix trapezoid of values(a)*exp(-lambda*a): T[j] = integral over
// [a_j, a_max] plus a constant-extension analytic tail beyond a_max
// (values and extra_rate frozen at their a_max samples). Accumulated
// right-to-left so small tails carry full relative precision.
// values must already include any survival factor e^{-H}; extra_rate_at_amax
// is the hazard slope used for the beyond-grid tail.
std::vector<double> suffix_decayed_integral(const AgeGrid& grid, std::span<const double> values,
                                            double lambda, double extra_rate_at_amax);

// exp(-lambda * a_j) for every node, blockwise (cheap, reproducible).
std::vector<double> exp_decay_nodes(const AgeGrid& grid, double lambda);

}  // namespace agepde
