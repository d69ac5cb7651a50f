#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slabperc/cluster.hpp"
#include "slabperc/config.hpp"
#include "slabperc/geometry.hpp"

namespace slabperc {

/// Monte Carlo event-probability estimate with a 95% Wilson interval.
struct Estimate {
    double p_hat = 0.0;
    long n_samples = 0;
    long hits = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t seed = 0;
    long streams = 0;  // streams consumed (one per sample)
};

Estimate make_estimate(long hits, long n, std::uint64_t seed);
double wilson_low(long hits, long n);
double wilson_high(long hits, long n);

/// One connection/uniqueness event inside an ambient region.
struct CompiledEvent {
    bool unique = false;
    std::vector<int> src;  // compact vertex ids in the group's RegionGraph
    std::vector<int> dst;
};

struct BatteryGroup {
    RegionGraph graph;
    std::vector<CompiledEvent> events;
};

/// Derived counter over the per-sample event indicator bits (global event
/// indices across groups, in declaration order).
struct JointSpec {
    std::uint64_t all_of = 0;
    std::uint64_t none_of = 0;
    std::uint64_t any_of = 0;
};

struct BatteryResult {
    std::vector<long> hits;
    std::vector<long> joint_hits;
    long n = 0;
    std::uint64_t seed = 0;
};

/// Evaluates all events of all groups on one shared sample per stream
/// (streams 0..N-1), so event-inclusion inequalities hold per sample, not
/// just in expectation. OpenMP-parallel over streams; hit counts are
/// integers, so results are identical for any worker count.
BatteryResult run_battery(const SlabGeometry& g, double p, long n_samples, std::uint64_t seed,
                          const std::vector<BatteryGroup>& groups,
                          const std::vector<JointSpec>& joints = {});

/// Serial reference implementation; must agree bit for bit with run_battery.
BatteryResult run_battery_serial(const SlabGeometry& g, double p, long n_samples,
                                 std::uint64_t seed, const std::vector<BatteryGroup>& groups,
                                 const std::vector<JointSpec>& joints = {});

/// Generic single-event estimator over an arbitrary predicate.
Estimate estimate_event(const SlabGeometry& g, double p, long n_samples, std::uint64_t seed,
                        const std::function<bool(const Configuration&)>& event);

/// Crossing event E_n(alpha, beta) = {S_n <->(B_n) {n} x [alpha, beta]} with
/// S_n = B_u.
struct CrossingSpec {
    int n = 1;
    int alpha = 0;
    int beta = 0;
    void validate() const;
};

Estimate estimate_crossing(int k, CrossingSpec spec, int u, double p, long n_samples,
                           std::uint64_t seed);

/// Uniqueness crossing of Eq-style events: B_u <->!B_n! boundary(B_n).
Estimate estimate_uniqueness_crossing(int k, int n, int u, double p, long n_samples,
                                      std::uint64_t seed);

struct SelectedU {
    int u = 0;
    bool flagged = false;  // no u reached the target; u is the argmax instead
    std::vector<Estimate> estimates;  // per u = 0..floor(n/3)
};

/// Smallest u <= n/3 whose uniqueness-crossing estimate reaches the target;
/// flagged fallback to the largest-estimate u otherwise. All u evaluated on
/// shared samples.
SelectedU select_u(int k, int n, double p, double target, long n_samples, std::uint64_t seed);
inline constexpr double kDefaultSelectUTarget = 0.9;

struct SelectedAlpha {
    int alpha = 1;
    bool flagged = false;  // the defining set was empty
    std::vector<double> left;   // P[E_n(0, a-1)] for a = 1..n-1
    std::vector<double> right;  // P[E_n(a, n)]
};

/// The defining max over point estimates, evaluated on one shared sample set.
SelectedAlpha select_alpha(int k, int n, int u, double p, long n_samples, std::uint64_t seed);

/// The same max evaluated on externally supplied probability tables
/// (left[i] ~ alpha = i+1). Used for synthetic-table checks.
SelectedAlpha alpha_from_tables(const std::vector<double>& left, const std::vector<double>& right);

struct SelectedY {
    int y = 0;
    int y_lo = 0, y_hi = 0;            // the two candidates
    Estimate est_lo, est_hi;           // their crossing estimates
    Estimate est_union;                // union of the two candidate events
    Estimate est_full;                 // E_n(0, alpha)
    double sqrt_bound = 0.0;           // 1 - sqrt(1 - union estimate)
};

/// Chooses y in {floor(a/4), floor(3a/4)} maximizing the estimate of
/// E_n(y - floor(a/4), y + floor(a/4)) on shared samples; ties to smaller y.
SelectedY select_y(int k, int n, int alpha, int u, double p, long n_samples, std::uint64_t seed);

/// 1 - (1 - p_union)^(1/m).
double sqrt_trick_bound(double p_union, int m);

struct SequenceRow {
    int n = 0;
    int u = 0;
    int alpha = 1;
    int y = 0;
    bool u_flagged = false;
    bool alpha_flagged = false;
    double u_estimate = 0.0;
    double alpha_left = 0.0, alpha_right = 0.0;
    double y_estimate = 0.0;
};

struct SequenceTable {
    std::vector<SequenceRow> rows;
    const SequenceRow* row(int n) const;
};

SequenceTable build_sequences(int k, const std::vector<int>& scales, double p, double target,
                              long n_samples, std::uint64_t seed);

/// All n <= n_max (with rows for n and 3n present) such that
/// alpha_{3n} <= 4 alpha_n.
std::vector<int> feasible_scales(const SequenceTable& table, int n_max);

struct TripleResult {
    bool flagged = false;          // alpha_{3n} > 4 alpha_n
    Estimate joint;
    Estimate arm_a;                // S_{3n} <-> Z_n in B_{3n}
    Estimate arm_minus, arm_plus;  // S'_n <-> Y-/Y+ in B'_n
    Estimate crossing_small;       // E_n(0, alpha_n)
    double harris_bound = 0.0;     // arm_a * crossing_small^2
};

TripleResult estimate_triple(int k, int n, const SequenceTable& table, double p, long n_samples,
                             std::uint64_t seed);

struct PcCurve {
    int scale = 0;
    std::vector<double> thresholds;  // per-sample crossing onset p*, sorted
    double probability_at(double p) const;
};

struct PcResult {
    bool flagged = false;  // some successive pair of curves did not intersect
    double pc = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
    std::vector<double> grid;
    std::vector<PcCurve> curves;
    std::vector<double> pair_estimates;  // one per successive scale pair
};

/// Crossing-probability curves of [0,2L] x [0,L] (lifted) on the p grid via
/// the monotone coupling; pc from the intersection of successive scales,
/// with a bootstrap confidence interval (1000 resamples).
PcResult estimate_pc(int k, const std::vector<int>& scales, const std::vector<double>& grid,
                     long n_samples, std::uint64_t seed);

/// Per-sample crossing onset thresholds for one scale (coupled sweep).
PcCurve pc_curve(int k, int scale, long n_samples, std::uint64_t seed);

}  // namespace slabperc
