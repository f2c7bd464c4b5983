#ifndef VARBOUND_BARRIER_SOLVER_HPP
#define VARBOUND_BARRIER_SOLVER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "varbound/potentials.hpp"

namespace varbound {

struct GridConfig {
    double xi_min = 0.0;  // log-price
    double xi_max = 0.0;
    int nx = 401;
    double t_max = 0.0;  // quadratic-variation clock, not calendar time
    double stability_factor = 0.9;
};

struct Grid {
    std::vector<double> xi_nodes;  // uniform in log-price
    std::vector<double> prices;    // exp(xi)
    int nx = 0;
    double dx = 0.0;
    double t_max = 0.0;
    int nt = 0;
    double dt = 0.0;
    double stability_factor = 0.9;
};

// dt is the largest value satisfying dt <= stability_factor * dx^2 / (1 + dx/2)
// that divides t_max into an integer number of steps.
Grid build_grid(const GridConfig& config);

enum class BarrierKind { root, rost };

struct ValueFunction {
    BarrierKind kind = BarrierKind::root;
    int index = 0;  // 1-based maturity index within a sequence
    const Grid* grid = nullptr;
    int snapshot_stride = 1;
    std::vector<int> snapshot_steps;
    std::vector<std::vector<double>> snapshots;  // one row per stored step
};

struct Barrier {
    BarrierKind kind = BarrierKind::root;
    int maturity_index = 0;
    std::vector<double> x_grid;  // prices
    // Root: first contact time, +inf where no contact before t_max.
    // Rost: last contact time, 0 where never in contact.
    std::vector<double> times;
    std::vector<std::uint8_t> mask;  // 1 = confident
};

struct SolveOptions {
    double spot = 1.0;              // sets the scale of tolerances
    double contact_tol_rel = 1e-7;  // contact when value - obstacle <= rel * spot
    int snapshot_stride = 0;        // 0 = auto from the memory budget
    double snapshot_budget_mb = 64.0;
};

struct SolveResult {
    ValueFunction vf;
    std::vector<double> contact_times;  // dt-resolution, sentinels applied
    std::vector<std::string> warnings;
};

// Single-marginal solve: start data from the initial potential, obstacle from
// the target potential (Root) or their difference (Rost).
SolveResult solve_root(const PotentialCurve& initial, const PotentialCurve& target,
                       const Grid& grid, const SolveOptions& opt = {});
SolveResult solve_rost(const PotentialCurve& initial, const PotentialCurve& target,
                       const Grid& grid, const SolveOptions& opt = {});

// Inductive solve against a stored previous value function. Rows between
// snapshots are interpolated linearly in time.
SolveResult solve_root(const ValueFunction& u_prev, const PotentialCurve& initial,
                       const PotentialCurve& prev_target, const PotentialCurve& target,
                       const Grid& grid, const SolveOptions& opt = {});
SolveResult solve_rost(const ValueFunction& v_prev, const PotentialCurve& initial,
                       const PotentialCurve& prev_target, const PotentialCurve& target,
                       const Grid& grid, const SolveOptions& opt = {});

struct SequenceEntry {
    SolveResult result;
    Barrier barrier;  // mask filled from confident_mask with opt epsilon
};

struct SequenceOptions {
    SolveOptions solve;
    double epsilon = 0.01;  // confidence threshold on |U_k - U_lambda| / spot
};

// Inductive multi-marginal solve: all layers march in lockstep, layer k's
// obstacle reading layer k-1 at the same time level. Requires convex order.
std::vector<SequenceEntry> solve_sequence(BarrierKind kind, const PotentialCurve& initial,
                                          std::span<const PotentialCurve> targets,
                                          const Grid& grid, const SequenceOptions& opt);

// Barrier from stored snapshots against a static obstacle; resolution is the
// snapshot stride. The in-loop contact times in SolveResult are exact to dt.
Barrier extract_barrier(const ValueFunction& vf, std::span<const double> obstacle,
                        double contact_tol);

Barrier make_barrier(BarrierKind kind, int maturity_index, const Grid& grid,
                     std::span<const double> contact_times, std::vector<std::uint8_t> mask);

// Node confident iff the target potential is at least epsilon * spot away
// from the initial tent and the node is untouched by tail correction.
std::vector<std::uint8_t> confident_mask(const PotentialCurve& initial,
                                         const PotentialCurve& target, double epsilon,
                                         double spot);

}  // namespace varbound

#endif
