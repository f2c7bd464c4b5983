#include "varbound/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "varbound/errors.hpp"

namespace varbound {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        std::size_t b = field.find_first_not_of(" \t\r");
        std::size_t e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_kind(const std::string& s, OptionKind& out) {
    if (s == "C" || s == "c" || s == "call" || s == "CALL" || s == "Call") {
        out = OptionKind::call;
        return true;
    }
    if (s == "P" || s == "p" || s == "put" || s == "PUT" || s == "Put") {
        out = OptionKind::put;
        return true;
    }
    return false;
}

// Quotes usable for parity estimation: both sides quoted at the same (K, T).
struct ParityPair {
    double call_mid;
    double put_mid;
};

std::map<double, std::map<double, ParityPair>> parity_pairs(const QuoteSet& qs) {
    std::map<double, std::map<double, std::pair<const Quote*, const Quote*>>> seen;
    for (const Quote& q : qs.quotes) {
        if (q.zero_bid) continue;
        auto& slot = seen[q.maturity][q.strike];
        if (q.option_kind == OptionKind::call) slot.first = &q;
        else slot.second = &q;
    }
    std::map<double, std::map<double, ParityPair>> out;
    for (auto& [t, by_strike] : seen)
        for (auto& [k, pq] : by_strike)
            if (pq.first && pq.second)
                out[t][k] = ParityPair{pq.first->mid, pq.second->mid};
    return out;
}

double trimmed_mean(std::vector<PairValue>& pairs, double trim_quantile) {
    VB_REQUIRE(!pairs.empty(), InsufficientDataError, "no usable strike pairs for estimation");
    if (trim_quantile > 0.0 && pairs.size() > 4) {
        std::vector<PairValue> sorted = pairs;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const PairValue& a, const PairValue& b) { return a.value < b.value; });
        std::size_t cut = static_cast<std::size_t>(trim_quantile * sorted.size());
        cut = std::min(cut, (sorted.size() - 1) / 2);
        pairs.assign(sorted.begin() + cut, sorted.end() - cut);
    }
    double sum = 0.0;
    for (const PairValue& p : pairs) sum += p.value;
    return sum / static_cast<double>(pairs.size());
}

}  // namespace

QuoteSet parse_quotes(const std::string& text, double spot) {
    VB_REQUIRE(spot > 0.0, ConfigError, "parse_quotes: spot must be positive, got " << spot);
    std::stringstream ss(text);
    std::string line;
    VB_REQUIRE(std::getline(ss, line), ParseError, "parse_quotes: empty input");

    auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"kind", "strike", "maturity_years", "bid", "ask"};
    VB_REQUIRE(header.size() == expected.size() &&
                   std::equal(header.begin(), header.end(), expected.begin()),
               ParseError, "parse_quotes: malformed header '" << line << "'");

    QuoteSet qs;
    qs.spot = spot;
    std::set<double> mats;
    while (std::getline(ss, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        Quote q;
        bool ok = fields.size() == 5 && parse_kind(fields[0], q.option_kind) &&
                  parse_double(fields[1], q.strike) && parse_double(fields[2], q.maturity) &&
                  parse_double(fields[3], q.bid) && parse_double(fields[4], q.ask);
        if (!ok || !q.valid()) {
            ++qs.dropped_rows;
            continue;
        }
        q.mid = 0.5 * (q.bid + q.ask);
        q.zero_bid = q.bid == 0.0;
        mats.insert(q.maturity);
        qs.quotes.push_back(q);
    }
    VB_REQUIRE(!qs.quotes.empty(), ParseError,
               "parse_quotes: zero usable rows (" << qs.dropped_rows << " dropped)");
    qs.maturities.assign(mats.begin(), mats.end());
    return qs;
}

std::string write_quotes_csv(const QuoteSet& qs) {
    std::string out = "kind,strike,maturity_years,bid,ask\n";
    char buf[160];
    for (const Quote& q : qs.quotes) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g\n",
                      q.option_kind == OptionKind::call ? "C" : "P", q.strike, q.maturity,
                      q.bid, q.ask);
        out += buf;
    }
    return out;
}

RateEstimate estimate_implied_rate(const QuoteSet& qs, const EstimatorOptions& opt) {
    auto pairs = parity_pairs(qs);
    RateEstimate est;
    for (const auto& [t, by_strike] : pairs) {
        if (t < opt.min_pair_maturity) continue;
        if (by_strike.size() < 2) continue;
        std::vector<double> ks, pc;  // strike, P - C
        ks.reserve(by_strike.size());
        for (const auto& [k, pq] : by_strike) {
            ks.push_back(k);
            pc.push_back(pq.put_mid - pq.call_mid);
        }
        const std::size_t n = ks.size();
        for (std::size_t i = 0; i < n; ++i) {
            double slope;
            if (i == 0) slope = (pc[1] - pc[0]) / (ks[1] - ks[0]);
            else if (i + 1 == n) slope = (pc[n - 1] - pc[n - 2]) / (ks[n - 1] - ks[n - 2]);
            else slope = (pc[i + 1] - pc[i - 1]) / (ks[i + 1] - ks[i - 1]);
            // slope of (P - C) in K is e^{-rT}; must be positive to invert
            if (slope <= 0.0) continue;
            est.per_pair_values.push_back({ks[i], t, -std::log(slope) / t});
        }
    }
    VB_REQUIRE(!est.per_pair_values.empty(), InsufficientDataError,
               "estimate_implied_rate: fewer than 2 call/put-matched strikes at every maturity");
    est.rate = trimmed_mean(est.per_pair_values, opt.trim_quantile);
    VB_REQUIRE(std::isfinite(est.rate), NumericError, "estimate_implied_rate: non-finite result");
    return est;
}

RateEstimate estimate_implied_dividend(const QuoteSet& qs, double rate,
                                       const EstimatorOptions& opt) {
    VB_REQUIRE(std::isfinite(rate), ConfigError, "estimate_implied_dividend: rate not finite");
    auto pairs = parity_pairs(qs);
    RateEstimate est;
    for (const auto& [t, by_strike] : pairs) {
        if (t < opt.min_pair_maturity) continue;
        for (const auto& [k, pq] : by_strike) {
            double arg = (pq.call_mid - pq.put_mid + k * std::exp(-rate * t)) / qs.spot;
            if (arg <= 0.0) continue;  // pair skipped
            est.per_pair_values.push_back({k, t, -std::log(arg) / t});
        }
    }
    VB_REQUIRE(!est.per_pair_values.empty(), InsufficientDataError,
               "estimate_implied_dividend: all pairs skipped");
    est.dividend = trimmed_mean(est.per_pair_values, opt.trim_quantile);
    VB_REQUIRE(std::isfinite(est.dividend), NumericError,
               "estimate_implied_dividend: non-finite result");
    return est;
}

std::string quote_set_to_json(const QuoteSet& qs) {
    nlohmann::ordered_json j;
    j["spot"] = qs.spot;
    j["maturities"] = qs.maturities;
    j["dropped_rows"] = qs.dropped_rows;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Quote& q : qs.quotes) {
        nlohmann::ordered_json jq;
        jq["option_kind"] = q.option_kind == OptionKind::call ? "call" : "put";
        jq["strike"] = q.strike;
        jq["maturity"] = q.maturity;
        jq["bid"] = q.bid;
        jq["ask"] = q.ask;
        jq["mid"] = q.mid;
        arr.push_back(std::move(jq));
    }
    j["quotes"] = std::move(arr);
    return j.dump(2);
}

std::string rate_estimate_to_json(const RateEstimate& rate_part, const RateEstimate& div_part) {
    nlohmann::ordered_json j;
    j["rate"] = rate_part.rate;
    j["dividend"] = div_part.dividend;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    auto append = [&arr](const RateEstimate& part, const char* quantity) {
        for (const PairValue& p : part.per_pair_values) {
            nlohmann::ordered_json jp;
            jp["quantity"] = quantity;
            jp["strike"] = p.strike;
            jp["maturity"] = p.maturity;
            jp["value"] = p.value;
            arr.push_back(std::move(jp));
        }
    };
    append(rate_part, "rate");
    append(div_part, "dividend");
    j["per_pair_values"] = std::move(arr);
    return j.dump(2);
}

}  // namespace varbound
