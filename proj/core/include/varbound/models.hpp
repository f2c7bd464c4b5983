#ifndef VARBOUND_MODELS_HPP
#define VARBOUND_MODELS_HPP

#include <optional>
#include <span>
#include <vector>

#include "varbound/market_data.hpp"
#include "varbound/numerics.hpp"

namespace varbound {

struct BsParams {
    double vol = 0.0;  // per sqrt(year)
};

struct HestonParams {
    double v0 = 0.0;       // initial variance
    double vbar = 0.0;     // long-run variance
    double rho = 0.0;      // correlation in [-1, 1]
    double kappa = 0.0;    // mean-reversion speed, 1/years
    double sigma_v = 0.0;  // volatility of variance

    bool valid() const {
        return v0 > 0.0 && vbar > 0.0 && kappa > 0.0 && sigma_v > 0.0 &&
               rho >= -1.0 && rho <= 1.0;
    }
};

// One exponential tail splice: for the right tail c(x) = a e^{-b x} beyond
// the knee, for the left tail c(x) = (f0 - x) + a e^{b x} below it.
struct ExpTail {
    double knee = 0.0;
    double a = 0.0;
    double b = 0.0;
};

struct CallCurve {
    double maturity = 0.0;
    std::vector<double> strikes;  // increasing
    std::vector<double> prices;
    double zero_strike_value = 0.0;  // discounted forward value, the price at K = 0
    std::optional<ExpTail> left_tail;
    std::optional<ExpTail> right_tail;
};

// Evaluates a call curve anywhere in its extended domain: monotone cubic
// between sampled strikes, exponential tails beyond the knees when present.
// Throws NumericError outside the extended domain.
class CallCurveEvaluator {
  public:
    explicit CallCurveEvaluator(const CallCurve& curve);
    double operator()(double strike) const;

  private:
    const CallCurve& curve_;
    PchipInterpolant interp_;
    double lo_, hi_;  // strike range covered by the interpolant
};

double call_curve_value(const CallCurve& curve, double strike);

double bs_call(double spot, double strike, double maturity, double rate, double dividend,
               const BsParams& params);
double bs_put(double spot, double strike, double maturity, double rate, double dividend,
              const BsParams& params);

// Semi-analytic Heston call via characteristic-function quadrature
// (adaptive Gauss-Lobatto on the Lewis single-integral representation).
// Absolute error at most ~1e-8 * spot.
double heston_call(double spot, double strike, double maturity, double rate, double dividend,
                   const HestonParams& params);
double heston_put(double spot, double strike, double maturity, double rate, double dividend,
                  const HestonParams& params);

// Prices many strikes of one maturity from a shared characteristic-function
// table on a fixed high-order rule. Matches heston_call to ~1e-8 * spot and
// is the workhorse behind calibration and curve sampling.
class HestonSlicePricer {
  public:
    HestonSlicePricer(double spot, double rate, double dividend, double maturity,
                      const HestonParams& params);
    double call(double strike) const;

  private:
    double spot_, fwd_, df_;
    std::vector<double> nodes_, weights_;
    std::vector<double> phi_re_, phi_im_;
};

struct CalibrationOptions {
    double zero_bid_weight = 0.25;
    int max_iterations = 4000;
};

// Least-squares fit of the single Black-Scholes vol to the call mids.
BsParams calibrate_bs(const QuoteSet& qs, double rate, double dividend,
                      const CalibrationOptions& opt = {});

// Weighted least-squares Heston fit with a fixed list of starting points;
// deterministic given inputs.
HestonParams calibrate_heston(const QuoteSet& qs, double rate, double dividend,
                              const CalibrationOptions& opt = {});

// Weighted RMSE of model call prices against the call mids, in currency.
double calibration_rmse_bs(const QuoteSet& qs, double rate, double dividend, const BsParams& p,
                           const CalibrationOptions& opt = {});
double calibration_rmse_heston(const QuoteSet& qs, double rate, double dividend,
                               const HestonParams& p, const CalibrationOptions& opt = {});

// Replaces non-convex tail regions with exponential tails matched in value
// and first derivative at the last convex strikes. Returns the input curve
// unchanged if no convexity failure is found.
CallCurve tail_correct(const CallCurve& curve);

CallCurve sample_call_curve_bs(double spot, double maturity, double rate, double dividend,
                               const BsParams& params, std::span<const double> strikes);
CallCurve sample_call_curve_heston(double spot, double maturity, double rate, double dividend,
                                   const HestonParams& params, std::span<const double> strikes);

}  // namespace varbound

#endif
