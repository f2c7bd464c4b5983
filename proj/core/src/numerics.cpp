#include "varbound/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "varbound/errors.hpp"

namespace varbound {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double brent_minimize(const std::function<double(double)>& f, double a, double b,
                      double xtol, int max_iter) {
    VB_REQUIRE(a < b, NumericError, "brent_minimize: empty bracket [" << a << ", " << b << "]");
    const double gold = 0.3819660112501051;
    double x = a + gold * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        double m = 0.5 * (a + b);
        double tol1 = xtol * (std::fabs(x) + 1e-30) + 1e-15;
        double tol2 = 2.0 * tol1;
        if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) break;
        bool parabolic = false;
        if (std::fabs(e) > tol1) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            double e_old = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = gold * e;
        }
        double u = (std::fabs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
        double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return x;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> step,
                             double ftol, int max_iter) {
    const std::size_t n = x0.size();
    VB_REQUIRE(n >= 1 && step.size() == n, NumericError, "nelder_mead: bad dimensions");

    std::vector<std::vector<double>> pts(n + 1, std::vector<double>(x0.begin(), x0.end()));
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fs[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    NelderMeadResult result;

    int it = 0;
    for (; it < max_iter; ++it) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::size_t best = order[0], worst = order[n], second = order[n - 1];

        if (std::fabs(fs[worst] - fs[best]) <= ftol * (1.0 + std::fabs(fs[best]))) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - pts[worst][j]);
        double fr = f(xr);
        if (fr < fs[best]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
            double fe = f(xe);
            if (fe < fr) { pts[worst] = xe; fs[worst] = fe; }
            else { pts[worst] = xr; fs[worst] = fr; }
        } else if (fr < fs[second]) {
            pts[worst] = xr; fs[worst] = fr;
        } else {
            bool outside = fr < fs[worst];
            const std::vector<double>& base = outside ? xr : pts[worst];
            for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + 0.5 * (base[j] - centroid[j]);
            double fc = f(xc);
            if (fc < std::min(fr, fs[worst])) {
                pts[worst] = xc; fs[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
                    fs[i] = f(pts[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    result.x = pts[best];
    result.fmin = fs[best];
    result.iterations = it;
    return result;
}

namespace {

struct LobattoWorker {
    const std::function<double(double)>& f;
    double tol_per_len;  // accepted error per unit interval length
    int max_depth;

    static constexpr double alpha = 0.816496580927726033;   // sqrt(2/3)
    static constexpr double beta = 0.447213595499957939;    // 1/sqrt(5)

    double recurse(double a, double b, double fa, double fb, int depth) const {
        double h = 0.5 * (b - a);
        double m = 0.5 * (a + b);
        double mll = m - alpha * h, ml = m - beta * h, mr = m + beta * h, mrr = m + alpha * h;
        double fmll = f(mll), fml = f(ml), fm = f(m), fmr = f(mr), fmrr = f(mrr);
        double i2 = (h / 6.0) * (fa + fb + 5.0 * (fml + fmr));
        double i1 = (h / 1470.0) *
                    (77.0 * (fa + fb) + 432.0 * (fmll + fmrr) + 625.0 * (fml + fmr) + 672.0 * fm);
        double err = std::fabs(i1 - i2);
        double budget = tol_per_len * (b - a);
        if (err <= budget || m == a || m == b) return i1;
        VB_REQUIRE(depth < max_depth, NumericError,
                   "gauss_lobatto: no convergence on [" << a << ", " << b << "], err=" << err);
        return recurse(a, mll, fa, fmll, depth + 1) +
               recurse(mll, ml, fmll, fml, depth + 1) +
               recurse(ml, m, fml, fm, depth + 1) +
               recurse(m, mr, fm, fmr, depth + 1) +
               recurse(mr, mrr, fmr, fmrr, depth + 1) +
               recurse(mrr, b, fmrr, fb, depth + 1);
    }
};

}  // namespace

double gauss_lobatto(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    LobattoWorker w{f, abs_tol / (b - a), max_depth};
    double fa = f(a), fb = f(b);
    return w.recurse(a, b, fa, fb, 0);
}

GaussLegendreRule gauss_legendre(int n) {
    VB_REQUIRE(n >= 2, NumericError, "gauss_legendre: n must be >= 2");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = 3.14159265358979323846;
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration on P_n from the Chebyshev-based initial guess
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // map from [-1, 1] to [0, 1]
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

PchipInterpolant::PchipInterpolant(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    VB_REQUIRE(n >= 2 && y_.size() == n, NumericError, "pchip: need >= 2 points");
    for (std::size_t i = 1; i < n; ++i)
        VB_REQUIRE(x_[i] > x_[i - 1], NumericError, "pchip: abscissae must increase");

    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) d = 0.0;
        else if (d0 * d1 <= 0.0 && std::fabs(d) > 3.0 * std::fabs(d0)) d = 3.0 * d0;
        return d;
    };
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t PchipInterpolant::locate(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t idx = static_cast<std::size_t>(it - x_.begin());
    if (idx == 0) return 0;
    if (idx >= x_.size()) return x_.size() - 2;
    return idx - 1;
}

double PchipInterpolant::operator()(double x) const {
    std::size_t i = locate(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    double h10 = t3 - 2.0 * t2 + t;
    double h01 = -2.0 * t3 + 3.0 * t2;
    double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double PchipInterpolant::derivative(double x) const {
    std::size_t i = locate(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double h00 = (6.0 * t * t - 6.0 * t) / h;
    double h10 = 3.0 * t * t - 4.0 * t + 1.0;
    double h01 = -h00;
    double h11 = 3.0 * t * t - 2.0 * t;
    return h00 * y_[i] + h10 * d_[i] + h01 * y_[i + 1] + h11 * d_[i + 1];
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream) {
    // decorrelate (seed, stream) pairs before use
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    splitmix64(s);
    state_ = s;
}

double GaussianStream::next_uniform() {
    // 53-bit mantissa uniform in (0, 1); never returns 0
    std::uint64_t bits = splitmix64(state_);
    return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double GaussianStream::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

}  // namespace varbound
