#ifndef VARBOUND_NUMERICS_HPP
#define VARBOUND_NUMERICS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace varbound {

double norm_cdf(double x);
double norm_pdf(double x);

// Scalar minimization by golden-section with parabolic refinement (Brent).
// Deterministic; returns the argmin of f on [a, b] to tolerance xtol.
double brent_minimize(const std::function<double(double)>& f, double a, double b,
                      double xtol = 1e-10, int max_iter = 200);

struct NelderMeadResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Deterministic Nelder-Mead simplex search. The initial simplex is x0 plus
// per-coordinate steps; no randomness anywhere.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> step,
                             double ftol = 1e-14, int max_iter = 4000);

// Adaptive Gauss-Lobatto quadrature (Gander & Gautschi pattern) with an
// absolute tolerance. Throws NumericError if the recursion cannot meet it.
double gauss_lobatto(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth = 40);

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [0, 1]
    std::vector<double> weights;
};

// Nodes and weights of the n-point Gauss-Legendre rule mapped to [0, 1].
GaussLegendreRule gauss_legendre(int n);

// Monotone (Fritsch-Carlson) cubic Hermite interpolant. Preserves
// monotonicity of the data and tracks convexity closely on smooth input.
class PchipInterpolant {
  public:
    PchipInterpolant() = default;
    PchipInterpolant(std::span<const double> x, std::span<const double> y);

    double operator()(double x) const;
    double derivative(double x) const;
    double x_min() const { return x_.empty() ? 0.0 : x_.front(); }
    double x_max() const { return x_.empty() ? 0.0 : x_.back(); }

  private:
    std::vector<double> x_, y_, d_;
    std::size_t locate(double x) const;
};

// SplitMix64: tiny deterministic stream generator used to key per-path RNG.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based Gaussian stream: xoshiro-free, schedule-independent. Each
// (seed, stream) pair yields a reproducible iid N(0,1) sequence via
// SplitMix64 + Box-Muller, identical across platforms.
class GaussianStream {
  public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream);
    double next();
    double next_uniform();  // in (0, 1)

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace varbound

#endif
