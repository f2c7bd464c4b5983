#ifndef VARBOUND_MARKET_DATA_HPP
#define VARBOUND_MARKET_DATA_HPP

#include <string>
#include <vector>

namespace varbound {

enum class OptionKind { call, put };

struct Quote {
    OptionKind option_kind = OptionKind::call;
    double strike = 0.0;
    double maturity = 0.0;  // years
    double bid = 0.0;
    double ask = 0.0;
    double mid = 0.0;
    bool zero_bid = false;  // kept but excluded from rate/dividend estimation

    bool valid() const {
        return strike > 0.0 && maturity > 0.0 && bid >= 0.0 && ask >= bid;
    }
};

struct QuoteSet {
    double spot = 0.0;
    std::vector<Quote> quotes;
    std::vector<double> maturities;  // sorted, distinct
    std::size_t dropped_rows = 0;    // rows rejected while parsing
};

struct PairValue {
    double strike = 0.0;
    double maturity = 0.0;
    double value = 0.0;
};

struct RateEstimate {
    double rate = 0.0;
    double dividend = 0.0;
    std::vector<PairValue> per_pair_values;
};

struct EstimatorOptions {
    double min_pair_maturity = 0.02;  // pairs below this are skipped (1/T noise)
    double trim_quantile = 0.0;       // symmetric trim of per-pair values, off by default
};

// Parses comma-separated quotes with header `kind,strike,maturity_years,bid,ask`.
// Rows violating the Quote invariants are dropped and counted.
QuoteSet parse_quotes(const std::string& text, double spot);

// Inverse of parse_quotes: emits the same delimited schema.
std::string write_quotes_csv(const QuoteSet& qs);

// Implied rate from put-call parity: the slope of (P - C) in strike equals
// e^{-rT}, estimated by centered differences on interior strikes and
// one-sided differences at the ends, averaged over all usable (K, T) pairs.
RateEstimate estimate_implied_rate(const QuoteSet& qs, const EstimatorOptions& opt = {});

// Implied dividend given a rate: q(K,T) = -log((C - P + K e^{-rT}) / P0) / T.
RateEstimate estimate_implied_dividend(const QuoteSet& qs, double rate,
                                       const EstimatorOptions& opt = {});

std::string quote_set_to_json(const QuoteSet& qs);
std::string rate_estimate_to_json(const RateEstimate& rate_part, const RateEstimate& div_part);

}  // namespace varbound

#endif
