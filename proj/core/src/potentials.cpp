#include "varbound/potentials.hpp"

#include <cmath>

#include "varbound/errors.hpp"

namespace varbound {

CallCurve forward_call_curve(const CallCurve& curve, double rate, double dividend,
                             std::span<const double> x_grid) {
    VB_REQUIRE(!x_grid.empty(), ConfigError, "forward_call_curve: empty grid");
    VB_REQUIRE(curve.strikes.front() > 0.0, DataError,
               "forward_call_curve: curve strikes must be positive");
    const double t = curve.maturity;
    const double strike_scale = std::exp(-(dividend - rate) * t);
    const double price_scale = std::exp(dividend * t);

    CallCurveEvaluator eval(curve);
    CallCurve fwd;
    fwd.maturity = t;
    fwd.strikes.assign(x_grid.begin(), x_grid.end());
    fwd.prices.reserve(x_grid.size());
    for (double x : x_grid) fwd.prices.push_back(price_scale * eval(strike_scale * x));
    fwd.zero_strike_value = price_scale * curve.zero_strike_value;

    // Tail splices transform along: knee/a/b in spot-strike units map to
    // forward units via K = strike_scale * x.
    if (curve.left_tail) {
        ExpTail t2;
        t2.knee = curve.left_tail->knee / strike_scale;
        t2.a = price_scale * curve.left_tail->a;
        t2.b = curve.left_tail->b * strike_scale;
        fwd.left_tail = t2;
    }
    if (curve.right_tail) {
        ExpTail t2;
        t2.knee = curve.right_tail->knee / strike_scale;
        t2.a = price_scale * curve.right_tail->a;
        t2.b = curve.right_tail->b * strike_scale;
        fwd.right_tail = t2;
    }
    return fwd;
}

PotentialCurve potential_from_calls(const CallCurve& forward_curve, double spot) {
    const std::size_t n = forward_curve.strikes.size();
    VB_REQUIRE(n >= 3, DataError, "potential_from_calls: need at least 3 grid points");
    PotentialCurve pot;
    pot.maturity = forward_curve.maturity;
    pot.x_grid = forward_curve.strikes;
    pot.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        pot.values[i] = spot - 2.0 * forward_curve.prices[i] - forward_curve.strikes[i];

    if (forward_curve.left_tail) pot.trusted_lo = forward_curve.left_tail->knee;
    if (forward_curve.right_tail) pot.trusted_hi = forward_curve.right_tail->knee;

    // Concavity check: discrete second difference of U must stay <= tol.
    const double tol = 1e-9 * std::max(spot, 1.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hl = pot.x_grid[i] - pot.x_grid[i - 1];
        double hr = pot.x_grid[i + 1] - pot.x_grid[i];
        double d2 = 2.0 *
                    ((pot.values[i + 1] - pot.values[i]) / hr -
                     (pot.values[i] - pot.values[i - 1]) / hl) /
                    (hl + hr);
        VB_REQUIRE(d2 * hl * hr <= tol, DataError,
                   "potential_from_calls: concavity violated at grid index "
                       << i << " (x=" << pot.x_grid[i] << ", d2=" << d2 << ")");
    }
    return pot;
}

PotentialCurve initial_potential(double spot, std::span<const double> x_grid) {
    VB_REQUIRE(spot > 0.0, ConfigError, "initial_potential: spot must be positive");
    PotentialCurve pot;
    pot.maturity = 0.0;
    pot.x_grid.assign(x_grid.begin(), x_grid.end());
    pot.values.reserve(x_grid.size());
    for (double x : x_grid) pot.values.push_back(-std::fabs(x - spot));
    return pot;
}

ConvexOrderReport check_convex_order(std::span<const PotentialCurve> seq, double spot) {
    ConvexOrderReport report;
    report.all_ordered = true;
    const double tol = 1e-7 * spot;
    for (std::size_t k = 1; k < seq.size(); ++k) {
        const PotentialCurve& prev = seq[k - 1];
        const PotentialCurve& cur = seq[k];
        VB_REQUIRE(prev.x_grid == cur.x_grid, ConfigError,
                   "check_convex_order: curves " << k - 1 << " and " << k
                                                 << " sampled on different grids");
        ConvexOrderPair pair;
        pair.index = k;
        pair.max_violation = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cur.values.size(); ++i)
            pair.max_violation = std::max(pair.max_violation, cur.values[i] - prev.values[i]);
        pair.ordered = pair.max_violation <= tol;
        report.all_ordered = report.all_ordered && pair.ordered;
        report.pairs.push_back(pair);
    }
    return report;
}

}  // namespace varbound
