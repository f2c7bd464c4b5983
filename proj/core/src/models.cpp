#include "varbound/models.hpp"

#include <algorithm>
#include <cmath>

#include "varbound/errors.hpp"

namespace varbound {

namespace {

void require_finite_inputs(double spot, double strike, double maturity, double rate,
                           double dividend, double vol_like) {
    VB_REQUIRE(std::isfinite(spot) && std::isfinite(strike) && std::isfinite(maturity) &&
                   std::isfinite(rate) && std::isfinite(dividend) && std::isfinite(vol_like),
               NumericError, "pricing inputs must be finite");
    VB_REQUIRE(spot > 0.0, NumericError, "spot must be positive, got " << spot);
    VB_REQUIRE(strike >= 0.0, NumericError, "strike must be non-negative, got " << strike);
    VB_REQUIRE(maturity > 0.0, NumericError, "maturity must be positive, got " << maturity);
}

}  // namespace

double bs_call(double spot, double strike, double maturity, double rate, double dividend,
               const BsParams& params) {
    require_finite_inputs(spot, strike, maturity, rate, dividend, params.vol);
    VB_REQUIRE(params.vol > 0.0, NumericError, "bs_call: vol must be positive");
    double df = std::exp(-rate * maturity);
    double fwd = spot * std::exp((rate - dividend) * maturity);
    if (strike == 0.0) return df * fwd;  // = spot * e^{-qT}
    double stddev = params.vol * std::sqrt(maturity);
    if (stddev < 1e-14) return df * std::max(fwd - strike, 0.0);
    double d1 = std::log(fwd / strike) / stddev + 0.5 * stddev;
    double d2 = d1 - stddev;
    return df * (fwd * norm_cdf(d1) - strike * norm_cdf(d2));
}

double bs_put(double spot, double strike, double maturity, double rate, double dividend,
              const BsParams& params) {
    double call = bs_call(spot, strike, maturity, rate, dividend, params);
    return call - spot * std::exp(-dividend * maturity) + strike * std::exp(-rate * maturity);
}

CallCurveEvaluator::CallCurveEvaluator(const CallCurve& curve)
    : curve_(curve), interp_(curve.strikes, curve.prices) {
    lo_ = curve.strikes.front();
    hi_ = curve.strikes.back();
    if (curve.left_tail) lo_ = std::min(lo_, curve.left_tail->knee);
    if (curve.right_tail) hi_ = std::max(hi_, curve.right_tail->knee);
}

double CallCurveEvaluator::operator()(double strike) const {
    if (curve_.left_tail && strike <= curve_.left_tail->knee) {
        VB_REQUIRE(strike >= 0.0, NumericError, "call curve queried at negative strike " << strike);
        const ExpTail& t = *curve_.left_tail;
        return (curve_.zero_strike_value - strike) + t.a * std::exp(t.b * strike);
    }
    if (curve_.right_tail && strike >= curve_.right_tail->knee) {
        const ExpTail& t = *curve_.right_tail;
        return t.a * std::exp(-t.b * strike);
    }
    VB_REQUIRE(strike >= curve_.strikes.front() - 1e-12 * curve_.strikes.back() &&
                   strike <= curve_.strikes.back() * (1.0 + 1e-12),
               NumericError, "strike " << strike << " outside call curve domain ["
                                       << curve_.strikes.front() << ", " << curve_.strikes.back()
                                       << "] and no tail extension present");
    return interp_(std::clamp(strike, curve_.strikes.front(), curve_.strikes.back()));
}

double call_curve_value(const CallCurve& curve, double strike) {
    return CallCurveEvaluator(curve)(strike);
}

namespace {

struct WeightedQuote {
    double strike;
    double maturity;
    double mid;
    double weight;
};

// Calibration uses call quotes only; zero-bid quotes stay with reduced weight.
std::vector<WeightedQuote> calibration_quotes(const QuoteSet& qs, const CalibrationOptions& opt) {
    std::vector<WeightedQuote> out;
    for (const Quote& q : qs.quotes) {
        if (q.option_kind != OptionKind::call) continue;
        out.push_back({q.strike, q.maturity, q.mid, q.zero_bid ? opt.zero_bid_weight : 1.0});
    }
    VB_REQUIRE(!out.empty(), InsufficientDataError, "calibration: no call quotes");
    return out;
}

}  // namespace

BsParams calibrate_bs(const QuoteSet& qs, double rate, double dividend,
                      const CalibrationOptions& opt) {
    auto quotes = calibration_quotes(qs, opt);
    auto objective = [&](double vol) {
        BsParams p{vol};
        double sum = 0.0, wsum = 0.0;
        for (const WeightedQuote& q : quotes) {
            double err = bs_call(qs.spot, q.strike, q.maturity, rate, dividend, p) - q.mid;
            sum += q.weight * err * err;
            wsum += q.weight;
        }
        return sum / wsum;
    };
    double vol = brent_minimize(objective, 1e-4, 3.0, 1e-12);
    VB_REQUIRE(vol > 1.5e-4 && vol < 2.999, Error,
               "calibrate_bs: optimizer stuck at bracket edge, vol=" << vol);
    return BsParams{vol};
}

double calibration_rmse_bs(const QuoteSet& qs, double rate, double dividend, const BsParams& p,
                           const CalibrationOptions& opt) {
    auto quotes = calibration_quotes(qs, opt);
    double sum = 0.0, wsum = 0.0;
    for (const WeightedQuote& q : quotes) {
        double err = bs_call(qs.spot, q.strike, q.maturity, rate, dividend, p) - q.mid;
        sum += q.weight * err * err;
        wsum += q.weight;
    }
    return std::sqrt(sum / wsum);
}

double calibration_rmse_heston(const QuoteSet& qs, double rate, double dividend,
                               const HestonParams& p, const CalibrationOptions& opt) {
    auto quotes = calibration_quotes(qs, opt);
    double sum = 0.0, wsum = 0.0;
    std::size_t i = 0;
    while (i < quotes.size()) {
        double t = quotes[i].maturity;
        HestonSlicePricer slice(qs.spot, rate, dividend, t, p);
        for (; i < quotes.size() && quotes[i].maturity == t; ++i) {
            double err = slice.call(quotes[i].strike) - quotes[i].mid;
            sum += quotes[i].weight * err * err;
            wsum += quotes[i].weight;
        }
    }
    return std::sqrt(sum / wsum);
}

namespace {

// Box constraints for the Heston search; kappa and sigma_v caps per the
// calibration design, rho kept strictly inside (-1, 1) for the transform.
constexpr double kV0Lo = 1e-6, kV0Hi = 4.0;
constexpr double kVbarLo = 1e-6, kVbarHi = 4.0;
constexpr double kKappaLo = 1e-3, kKappaHi = 20.0;
constexpr double kSigmaVLo = 1e-4, kSigmaVHi = 5.0;
constexpr double kRhoLim = 0.999;

double to_unconstrained(double x, double lo, double hi) {
    double u = (x - lo) / (hi - lo);
    u = std::clamp(u, 1e-12, 1.0 - 1e-12);
    return std::log(u / (1.0 - u));
}

double from_unconstrained(double z, double lo, double hi) {
    double u = 1.0 / (1.0 + std::exp(-z));
    return lo + (hi - lo) * u;
}

HestonParams decode(std::span<const double> z) {
    HestonParams p;
    p.v0 = from_unconstrained(z[0], kV0Lo, kV0Hi);
    p.vbar = from_unconstrained(z[1], kVbarLo, kVbarHi);
    p.rho = from_unconstrained(z[2], -kRhoLim, kRhoLim);
    p.kappa = from_unconstrained(z[3], kKappaLo, kKappaHi);
    p.sigma_v = from_unconstrained(z[4], kSigmaVLo, kSigmaVHi);
    return p;
}

std::vector<double> encode(const HestonParams& p) {
    return {to_unconstrained(p.v0, kV0Lo, kV0Hi),
            to_unconstrained(p.vbar, kVbarLo, kVbarHi),
            to_unconstrained(p.rho, -kRhoLim, kRhoLim),
            to_unconstrained(p.kappa, kKappaLo, kKappaHi),
            to_unconstrained(p.sigma_v, kSigmaVLo, kSigmaVHi)};
}

}  // namespace

HestonParams calibrate_heston(const QuoteSet& qs, double rate, double dividend,
                              const CalibrationOptions& opt) {
    VB_REQUIRE(qs.maturities.size() >= 3, InsufficientDataError,
               "calibrate_heston: need quotes spanning at least 3 maturities, have "
                   << qs.maturities.size());
    auto quotes = calibration_quotes(qs, opt);
    std::stable_sort(quotes.begin(), quotes.end(), [](const WeightedQuote& a, const WeightedQuote& b) {
        if (a.maturity != b.maturity) return a.maturity < b.maturity;
        return a.strike < b.strike;
    });

    // Normalized price-space objective, accumulated in fixed quote order.
    auto objective = [&](std::span<const double> z) -> double {
        HestonParams p = decode(z);
        double sum = 0.0, wsum = 0.0;
        std::size_t i = 0;
        while (i < quotes.size()) {
            double t = quotes[i].maturity;
            HestonSlicePricer slice(qs.spot, rate, dividend, t, p);
            for (; i < quotes.size() && quotes[i].maturity == t; ++i) {
                double err = (slice.call(quotes[i].strike) - quotes[i].mid) / qs.spot;
                sum += quotes[i].weight * err * err;
                wsum += quotes[i].weight;
            }
        }
        return sum / wsum;
    };

    double var_seed = calibrate_bs(qs, rate, dividend, opt).vol;
    var_seed *= var_seed;

    std::vector<HestonParams> starts;
    for (double kappa : {0.5, 3.0})
        for (double rho : {-0.8, -0.2})
            for (double sigma_v : {0.3, 1.0})
                starts.push_back({var_seed, var_seed, rho, kappa, sigma_v});

    NelderMeadResult best;
    best.fmin = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (const HestonParams& s : starts) {
        std::vector<double> z0 = encode(s);
        std::vector<double> step(z0.size(), 0.4);
        NelderMeadResult r = nelder_mead(objective, z0, step, 1e-14, opt.max_iterations);
        any_converged = any_converged || r.converged;
        if (r.fmin < best.fmin) best = r;
    }
    VB_REQUIRE(best.fmin < std::numeric_limits<double>::infinity(), Error,
               "calibrate_heston: all starts diverged; best objective unavailable");

    // Polish with a fresh simplex around the incumbent.
    std::vector<double> step(best.x.size(), 0.05);
    NelderMeadResult polished = nelder_mead(objective, best.x, step, 1e-15, opt.max_iterations);
    if (polished.fmin < best.fmin) best = polished;

    VB_REQUIRE(any_converged || best.converged, Error,
               "calibrate_heston: no start converged; best-so-far objective " << best.fmin);
    return decode(best.x);
}

namespace {

// Second-derivative estimate on a possibly non-uniform grid.
double second_difference(const std::vector<double>& x, const std::vector<double>& y,
                         std::size_t i) {
    double hl = x[i] - x[i - 1];
    double hr = x[i + 1] - x[i];
    return 2.0 * ((y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl) / (hl + hr);
}

}  // namespace

CallCurve tail_correct(const CallCurve& curve) {
    const std::size_t n = curve.strikes.size();
    VB_REQUIRE(n >= 4, DataError, "tail_correct: need at least 4 strikes, have " << n);

    // Scale and scan origin both come from the curve itself: the zero-strike
    // value is the discounted forward, which is also a good ATM proxy.
    double scale = curve.zero_strike_value > 0.0 ? curve.zero_strike_value : curve.prices.front();
    double threshold = -1e-8 * scale;
    std::size_t atm = 0;
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double d = std::fabs(curve.strikes[i] - scale);
            if (d < best) {
                best = d;
                atm = i;
            }
        }
        atm = std::clamp<std::size_t>(atm, 1, n - 2);
    }

    // First convexity failure scanning outward from ATM; the knee sits just
    // before it.
    std::optional<std::size_t> right_fail, left_fail;
    for (std::size_t i = atm; i + 1 < n; ++i) {
        if (second_difference(curve.strikes, curve.prices, i) < threshold) {
            right_fail = i;
            break;
        }
    }
    for (std::size_t i = atm; i >= 1; --i) {
        if (second_difference(curve.strikes, curve.prices, i) < threshold) {
            left_fail = i;
            break;
        }
    }

    if (!right_fail && !left_fail) return curve;

    CallCurve out = curve;
    if (right_fail) {
        std::size_t knee = *right_fail - 1;
        VB_REQUIRE(knee > atm, DataError,
                   "tail_correct: no convex interior region right of ATM strike");
        double x0 = curve.strikes[knee];
        double c0 = curve.prices[knee];
        double slope = (curve.prices[knee] - curve.prices[knee - 1]) /
                       (curve.strikes[knee] - curve.strikes[knee - 1]);
        VB_REQUIRE(c0 > 0.0 && slope < 0.0, DataError,
                   "tail_correct: right knee has degenerate value/slope (c=" << c0
                       << ", c'=" << slope << ")");
        ExpTail tail;
        tail.b = -slope / c0;
        tail.a = c0 * std::exp(tail.b * x0);
        tail.knee = x0;
        out.right_tail = tail;
        for (std::size_t i = knee + 1; i < n; ++i)
            out.prices[i] = tail.a * std::exp(-tail.b * curve.strikes[i]);
    }
    if (left_fail) {
        std::size_t knee = *left_fail + 1;
        VB_REQUIRE(knee < atm, DataError,
                   "tail_correct: no convex interior region left of ATM strike");
        double x0 = curve.strikes[knee];
        double c0 = curve.prices[knee];
        double slope = (curve.prices[knee + 1] - curve.prices[knee]) /
                       (curve.strikes[knee + 1] - curve.strikes[knee]);
        double f0 = curve.zero_strike_value;
        double excess = c0 - (f0 - x0);       // time value at the knee
        double slope_excess = slope + 1.0;    // slope above the intrinsic -1
        VB_REQUIRE(excess > 0.0 && slope_excess > 0.0, DataError,
                   "tail_correct: left knee not above intrinsic value (excess=" << excess
                       << ", slope+1=" << slope_excess << ")");
        ExpTail tail;
        tail.b = slope_excess / excess;
        tail.a = excess * std::exp(-tail.b * x0);
        tail.knee = x0;
        out.left_tail = tail;
        for (std::size_t i = 0; i < knee; ++i)
            out.prices[i] = (f0 - curve.strikes[i]) + tail.a * std::exp(tail.b * curve.strikes[i]);
    }
    return out;
}

CallCurve sample_call_curve_bs(double spot, double maturity, double rate, double dividend,
                               const BsParams& params, std::span<const double> strikes) {
    CallCurve c;
    c.maturity = maturity;
    c.strikes.assign(strikes.begin(), strikes.end());
    c.prices.reserve(strikes.size());
    for (double k : strikes) c.prices.push_back(bs_call(spot, k, maturity, rate, dividend, params));
    c.zero_strike_value = spot * std::exp(-dividend * maturity);
    return c;
}

CallCurve sample_call_curve_heston(double spot, double maturity, double rate, double dividend,
                                   const HestonParams& params, std::span<const double> strikes) {
    CallCurve c;
    c.maturity = maturity;
    c.strikes.assign(strikes.begin(), strikes.end());
    c.prices.reserve(strikes.size());
    HestonSlicePricer slice(spot, rate, dividend, maturity, params);
    for (double k : strikes) c.prices.push_back(slice.call(k));
    c.zero_strike_value = spot * std::exp(-dividend * maturity);
    return c;
}

}  // namespace varbound
