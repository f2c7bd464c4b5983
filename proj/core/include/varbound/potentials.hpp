#ifndef VARBOUND_POTENTIALS_HPP
#define VARBOUND_POTENTIALS_HPP

#include <limits>
#include <span>
#include <vector>

#include "varbound/models.hpp"

namespace varbound {

// Potential of a measure in the negative convention U_m(x) = -int |x-y| dm(y):
// concave, non-positive, tent-shaped for point masses.
struct PotentialCurve {
    double maturity = 0.0;
    std::vector<double> x_grid;  // increasing price grid
    std::vector<double> values;
    // Price interval untouched by tail correction; nodes outside are not
    // trusted when building confidence masks.
    double trusted_lo = -std::numeric_limits<double>::infinity();
    double trusted_hi = std::numeric_limits<double>::infinity();
};

// Call prices on the forward (martingale) process, sampled on x_grid:
// c(x,T) = e^{qT} C(e^{-(q-r)T} x, T), interpolating C cubically between
// its strikes and using the exponential tail extensions beyond them.
CallCurve forward_call_curve(const CallCurve& curve, double rate, double dividend,
                             std::span<const double> x_grid);

// U(x) = P0 - 2 c(x,T) - x for a forward-measure call curve; validates
// concavity of the result.
PotentialCurve potential_from_calls(const CallCurve& forward_curve, double spot);

// Potential of the point mass at the spot: the exact tent -|x - P0|.
PotentialCurve initial_potential(double spot, std::span<const double> x_grid);

struct ConvexOrderPair {
    std::size_t index = 0;        // pair (index-1, index) in the sequence
    double max_violation = 0.0;   // max over grid of U_k - U_{k-1}
    bool ordered = false;
};

struct ConvexOrderReport {
    std::vector<ConvexOrderPair> pairs;
    bool all_ordered = false;
};

// Adjacent curves are in convex order iff potentials decrease pointwise;
// tolerance 1e-7 * spot.
ConvexOrderReport check_convex_order(std::span<const PotentialCurve> seq, double spot);

}  // namespace varbound

#endif
