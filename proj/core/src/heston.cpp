#include <algorithm>
#include <cmath>
#include <complex>

#include "varbound/errors.hpp"
#include "varbound/models.hpp"
#include "varbound/numerics.hpp"

// Heston pricing through the Lewis single-integral representation
//
//   C = e^{-rT} [ F - (sqrt(F K)/pi) * I ],
//   I = \int_0^inf Re( e^{i u k} phi(u - i/2) ) / (u^2 + 1/4) du,
//
// with F the forward, k = ln(F/K) and phi the characteristic function of
// ln(S_T/F). The characteristic function uses the (beta - d) branch with all
// small-sigma_v cancellations rationalized, so the sigma_v -> 0 limit
// reproduces Black-Scholes to machine precision.

namespace varbound {

namespace {

using cd = std::complex<double>;

cd log1p_complex(cd z) {
    if (std::abs(z) < 1e-4) {
        // 4-term series; relative error below 1e-16 in this radius
        return z * (1.0 - z * (0.5 - z * (1.0 / 3.0 - z * 0.25)));
    }
    return std::log(1.0 + z);
}

struct HestonCf {
    double kappa, vbar, sigma_v, rho, v0, maturity;

    // E[exp(i z ln(S_T/F))] evaluated on the strip; z = u - i/2 here.
    cd operator()(cd z) const {
        const double sv2 = sigma_v * sigma_v;
        cd beta = cd(kappa, 0.0) - cd(0.0, rho * sigma_v) * z;
        cd lambda = z * z + cd(0.0, 1.0) * z;
        cd d = std::sqrt(beta * beta + sv2 * lambda);
        if (d.real() < 0.0) d = -d;
        cd bpd = beta + d;
        cd bmd_over_sv2 = -lambda / bpd;           // (beta - d)/sigma_v^2
        cd g_over_sv2 = -lambda / (bpd * bpd);     // g/sigma_v^2
        cd g = sv2 * g_over_sv2;
        cd em = std::exp(-d * maturity);

        cd d_term = bmd_over_sv2 * (1.0 - em) / (1.0 - g * em);
        // (1/sigma_v^2) * log((1 - g e^{-dT})/(1 - g)), rationalized
        cd log_term = (log1p_complex(-g * em) - log1p_complex(-g)) / sv2;
        cd a_term = kappa * vbar * (bmd_over_sv2 * maturity - 2.0 * log_term);
        return std::exp(a_term + d_term * v0);
    }
};

// Asymptotic decay rate of |phi(u - i/2)|: exp(-c u) with
// c = sqrt(1 - rho^2) (kappa vbar T + v0) / sigma_v.
double cf_decay_rate(const HestonParams& p, double maturity) {
    double root = std::sqrt(std::max(1.0 - p.rho * p.rho, 1e-8));
    return root * (p.kappa * p.vbar * maturity + p.v0) / p.sigma_v;
}

struct LewisIntegrand {
    HestonCf cf;
    double k;  // ln(F/K)

    double operator()(double u) const {
        cd z(u, -0.5);
        cd val = std::exp(cd(0.0, u * k)) * cf(z);
        return val.real() / (u * u + 0.25);
    }
};

void check_params(const HestonParams& p) {
    VB_REQUIRE(p.valid(), NumericError,
               "heston: invalid parameters (v0=" << p.v0 << ", vbar=" << p.vbar << ", rho="
                                                 << p.rho << ", kappa=" << p.kappa
                                                 << ", sigma_v=" << p.sigma_v << ")");
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double heston_call(double spot, double strike, double maturity, double rate, double dividend,
                   const HestonParams& params) {
    check_params(params);
    VB_REQUIRE(std::isfinite(spot) && spot > 0.0 && std::isfinite(strike) && strike >= 0.0 &&
                   std::isfinite(maturity) && maturity > 0.0,
               NumericError, "heston_call: bad inputs");
    double df = std::exp(-rate * maturity);
    double fwd = spot * std::exp((rate - dividend) * maturity);
    if (strike == 0.0) return df * fwd;

    LewisIntegrand g{HestonCf{params.kappa, params.vbar, params.sigma_v, params.rho, params.v0,
                              maturity},
                     std::log(fwd / strike)};

    const double price_tol = 1e-9 * spot;
    const double prefactor = df * std::sqrt(fwd * strike) / kPi;
    const double integral_tol = price_tol / prefactor;
    const double decay = cf_decay_rate(params, maturity);

    double upper = 200.0;
    double integral = gauss_lobatto([&](double u) { return g(u); }, 0.0, upper, integral_tol);
    for (int k = 0; k < 8; ++k) {
        // analytic cutoff bound: remaining tail at most |g(U)| / decay
        double tail_bound = std::fabs(g(upper)) * 10.0 / std::max(decay, 1e-8);
        if (tail_bound <= integral_tol) break;
        double next = 2.0 * upper;
        VB_REQUIRE(next <= 51200.0, NumericError,
                   "heston_call: quadrature tail does not converge (U=" << upper << ", bound="
                       << tail_bound << ", decay=" << decay << ")");
        integral += gauss_lobatto([&](double u) { return g(u); }, upper, next, integral_tol);
        upper = next;
    }

    double price = df * (fwd - std::sqrt(fwd * strike) / kPi * integral);
    VB_REQUIRE(std::isfinite(price), NumericError,
               "heston_call: non-finite price at K=" << strike << ", T=" << maturity);
    return price;
}

double heston_put(double spot, double strike, double maturity, double rate, double dividend,
                  const HestonParams& params) {
    double call = heston_call(spot, strike, maturity, rate, dividend, params);
    return call - spot * std::exp(-dividend * maturity) + strike * std::exp(-rate * maturity);
}

HestonSlicePricer::HestonSlicePricer(double spot, double rate, double dividend, double maturity,
                                     const HestonParams& params) {
    check_params(params);
    VB_REQUIRE(spot > 0.0 && maturity > 0.0, NumericError, "heston slice: bad inputs");
    spot_ = spot;
    df_ = std::exp(-rate * maturity);
    fwd_ = spot * std::exp((rate - dividend) * maturity);

    // Panel width 6 resolves the e^{iuk} oscillation for |k| up to ~4 at
    // 16 Gauss points per panel; the upper limit follows the cf decay rate.
    double decay = cf_decay_rate(params, maturity);
    double upper = 200.0;
    if (decay > 1e-8) upper = std::clamp(26.0 / decay, 200.0, 3200.0);

    static const GaussLegendreRule rule = gauss_legendre(16);
    const double panel = 6.0;
    int n_panels = static_cast<int>(std::ceil(upper / panel));
    nodes_.reserve(rule.nodes.size() * n_panels);
    weights_.reserve(rule.nodes.size() * n_panels);
    for (int p = 0; p < n_panels; ++p) {
        double a = p * panel;
        double b = std::min(upper, a + panel);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            nodes_.push_back(a + (b - a) * rule.nodes[i]);
            weights_.push_back((b - a) * rule.weights[i]);
        }
    }

    HestonCf cf{params.kappa, params.vbar, params.sigma_v, params.rho, params.v0, maturity};
    phi_re_.resize(nodes_.size());
    phi_im_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        cd v = cf(cd(nodes_[i], -0.5));
        VB_REQUIRE(std::isfinite(v.real()) && std::isfinite(v.imag()), NumericError,
                   "heston slice: characteristic function not finite at u=" << nodes_[i]);
        phi_re_[i] = v.real();
        phi_im_[i] = v.imag();
    }
}

double HestonSlicePricer::call(double strike) const {
    if (strike == 0.0) return df_ * fwd_;
    VB_REQUIRE(strike > 0.0, NumericError, "heston slice: negative strike " << strike);
    double k = std::log(fwd_ / strike);
    double integral = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        double u = nodes_[i];
        double c = std::cos(u * k), s = std::sin(u * k);
        // Re(e^{iuk} phi) = cos(uk) Re(phi) - sin(uk) Im(phi)
        integral += weights_[i] * (c * phi_re_[i] - s * phi_im_[i]) / (u * u + 0.25);
    }
    return df_ * (fwd_ - std::sqrt(fwd_ * strike) / kPi * integral);
}

}  // namespace varbound
