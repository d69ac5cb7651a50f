#include "slabperc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "slabperc/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace slabperc {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

double wilson_low(long hits, long n) {
    if (n == 0) return 0.0;
    const double ph = static_cast<double>(hits) / static_cast<double>(n);
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / static_cast<double>(n);
    const double center = ph + z2 / (2.0 * static_cast<double>(n));
    const double half = kZ95 * std::sqrt(ph * (1.0 - ph) / static_cast<double>(n) +
                                         z2 / (4.0 * static_cast<double>(n) * static_cast<double>(n)));
    return std::max(0.0, (center - half) / denom);
}

double wilson_high(long hits, long n) {
    if (n == 0) return 1.0;
    const double ph = static_cast<double>(hits) / static_cast<double>(n);
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / static_cast<double>(n);
    const double center = ph + z2 / (2.0 * static_cast<double>(n));
    const double half = kZ95 * std::sqrt(ph * (1.0 - ph) / static_cast<double>(n) +
                                         z2 / (4.0 * static_cast<double>(n) * static_cast<double>(n)));
    return std::min(1.0, (center + half) / denom);
}

Estimate make_estimate(long hits, long n, std::uint64_t seed) {
    Estimate e;
    e.hits = hits;
    e.n_samples = n;
    e.p_hat = n > 0 ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
    e.ci_low = std::min(wilson_low(hits, n), e.p_hat);
    e.ci_high = std::max(wilson_high(hits, n), e.p_hat);
    e.seed = seed;
    e.streams = n;
    return e;
}

namespace {

struct GroupScratch {
    UnionFind uf;
    std::vector<long long> mark;
    long long stamp = 0;
};

// Evaluates every event of every group on the configuration; returns the
// indicator bits (event index across groups).
std::uint64_t eval_groups(const std::vector<BatteryGroup>& groups, const Configuration& cfg,
                          std::vector<GroupScratch>& scratch) {
    std::uint64_t bits = 0;
    int idx = 0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const BatteryGroup& grp = groups[gi];
        GroupScratch& sc = scratch[gi];
        grp.graph.unite_open(cfg, sc.uf);
        if (sc.mark.size() != static_cast<std::size_t>(grp.graph.vertex_count()))
            sc.mark.assign(static_cast<std::size_t>(grp.graph.vertex_count()), 0);
        for (const CompiledEvent& ev : grp.events) {
            ++sc.stamp;
            for (int s : ev.src) sc.mark[static_cast<std::size_t>(sc.uf.find(s))] = sc.stamp;
            bool hit = false;
            if (!ev.unique) {
                for (int d : ev.dst) {
                    if (sc.mark[static_cast<std::size_t>(sc.uf.find(d))] == sc.stamp) {
                        hit = true;
                        break;
                    }
                }
            } else {
                int meeting = 0;
                for (int d : ev.dst) {
                    const int r = sc.uf.find(d);
                    if (sc.mark[static_cast<std::size_t>(r)] == sc.stamp) {
                        sc.mark[static_cast<std::size_t>(r)] = -sc.stamp;
                        if (++meeting > 1) break;
                    }
                }
                hit = meeting == 1;
            }
            if (hit) bits |= 1ULL << idx;
            ++idx;
        }
    }
    return bits;
}

std::vector<int> needed_edges(const std::vector<BatteryGroup>& groups) {
    std::vector<int> out;
    for (const auto& grp : groups)
        out.insert(out.end(), grp.graph.edge_ids().begin(), grp.graph.edge_ids().end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BatteryResult run_battery_impl(const SlabGeometry& g, double p, long n_samples, std::uint64_t seed,
                               const std::vector<BatteryGroup>& groups,
                               const std::vector<JointSpec>& joints, bool parallel) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("run_battery: p outside [0,1]");
    int n_events = 0;
    for (const auto& grp : groups) n_events += static_cast<int>(grp.events.size());
    if (n_events > 64) throw std::invalid_argument("run_battery: more than 64 events");

    const std::vector<int> edges = needed_edges(groups);
    std::vector<std::uint64_t> identities(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) identities[i] = g.edge_identity(edges[i]);

    BatteryResult out;
    out.n = n_samples;
    out.seed = seed;
    out.hits.assign(static_cast<std::size_t>(n_events), 0);
    out.joint_hits.assign(joints.size(), 0);

    const std::uint64_t master = seed;
    auto worker = [&](long lo, long hi, std::vector<long>& hits, std::vector<long>& jhits) {
        Configuration cfg(g.edge_count());
        std::vector<GroupScratch> scratch(groups.size());
        for (long s = lo; s < hi; ++s) {
            for (std::size_t i = 0; i < edges.size(); ++i) {
                cfg.set(edges[i],
                        edge_uniform(master, static_cast<std::uint64_t>(s), identities[i]) < p);
            }
            const std::uint64_t bits = eval_groups(groups, cfg, scratch);
            for (int e = 0; e < n_events; ++e)
                if ((bits >> e) & 1) ++hits[static_cast<std::size_t>(e)];
            for (std::size_t j = 0; j < joints.size(); ++j) {
                const JointSpec& js = joints[j];
                const bool ok = (bits & js.all_of) == js.all_of && (bits & js.none_of) == 0 &&
                                (js.any_of == 0 || (bits & js.any_of) != 0);
                if (ok) ++jhits[j];
            }
        }
    };

    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel
        {
            std::vector<long> hits(static_cast<std::size_t>(n_events), 0);
            std::vector<long> jhits(joints.size(), 0);
            const int nt = omp_get_num_threads();
            const int tid = omp_get_thread_num();
            const long chunk = (n_samples + nt - 1) / nt;
            const long lo = std::min<long>(n_samples, static_cast<long>(tid) * chunk);
            const long hi = std::min<long>(n_samples, lo + chunk);
            worker(lo, hi, hits, jhits);
#pragma omp critical
            {
                for (std::size_t i = 0; i < hits.size(); ++i) out.hits[i] += hits[i];
                for (std::size_t i = 0; i < jhits.size(); ++i) out.joint_hits[i] += jhits[i];
            }
        }
        return out;
#endif
    }
    worker(0, n_samples, out.hits, out.joint_hits);
    return out;
}

}  // namespace

BatteryResult run_battery(const SlabGeometry& g, double p, long n_samples, std::uint64_t seed,
                          const std::vector<BatteryGroup>& groups,
                          const std::vector<JointSpec>& joints) {
    return run_battery_impl(g, p, n_samples, seed, groups, joints, true);
}

BatteryResult run_battery_serial(const SlabGeometry& g, double p, long n_samples,
                                 std::uint64_t seed, const std::vector<BatteryGroup>& groups,
                                 const std::vector<JointSpec>& joints) {
    return run_battery_impl(g, p, n_samples, seed, groups, joints, false);
}

Estimate estimate_event(const SlabGeometry& g, double p, long n_samples, std::uint64_t seed,
                        const std::function<bool(const Configuration&)>& event) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("estimate_event: p outside [0,1]");
    long hits = 0;
#ifdef _OPENMP
#pragma omp parallel
    {
        long local = 0;
#pragma omp for schedule(static)
        for (long s = 0; s < n_samples; ++s) {
            const Configuration cfg = sample(g, p, {seed, static_cast<std::uint64_t>(s)});
            if (event(cfg)) ++local;
        }
#pragma omp critical
        hits += local;
    }
#else
    for (long s = 0; s < n_samples; ++s) {
        const Configuration cfg = sample(g, p, {seed, static_cast<std::uint64_t>(s)});
        if (event(cfg)) ++hits;
    }
#endif
    return make_estimate(hits, n_samples, seed);
}

void CrossingSpec::validate() const {
    if (n < 1 || alpha < 0 || beta < alpha || beta > n)
        throw std::invalid_argument("CrossingSpec: need 0 <= alpha <= beta <= n, n >= 1");
}

namespace {

// Builds a single-group battery over ambient box(n) with the given events.
struct CrossingContext {
    SlabGeometry geometry;
    std::vector<BatteryGroup> groups;
    CrossingContext(int k, int n) : geometry(k, PlanarBox{-n, n, -n, n}) {
        groups.emplace_back();
        groups.back().graph = RegionGraph(geometry, box_region(n));
    }
    void add_connect(const SlabGeometry& g, const Region& X, const Region& Y, bool unique = false) {
        CompiledEvent ev;
        ev.unique = unique;
        ev.src = groups.back().graph.compact_lift(g, X);
        ev.dst = groups.back().graph.compact_lift(g, Y);
        groups.back().events.push_back(std::move(ev));
    }
};

void check_u(int n, int u) {
    if (u < 0 || u > n / 3)
        throw std::invalid_argument("crossing: u must satisfy 0 <= u <= floor(n/3)");
}

}  // namespace

Estimate estimate_crossing(int k, CrossingSpec spec, int u, double p, long n_samples,
                           std::uint64_t seed) {
    spec.validate();
    check_u(spec.n, u);
    CrossingContext ctx(k, spec.n);
    ctx.add_connect(ctx.geometry, box_region(u), segment_region(spec.n, spec.alpha, spec.beta));
    const BatteryResult r = run_battery(ctx.geometry, p, n_samples, seed, ctx.groups);
    return make_estimate(r.hits[0], n_samples, seed);
}

Estimate estimate_uniqueness_crossing(int k, int n, int u, double p, long n_samples,
                                      std::uint64_t seed) {
    check_u(n, u);
    CrossingContext ctx(k, n);
    ctx.add_connect(ctx.geometry, box_region(u), boundary_region(n), /*unique=*/true);
    const BatteryResult r = run_battery(ctx.geometry, p, n_samples, seed, ctx.groups);
    return make_estimate(r.hits[0], n_samples, seed);
}

SelectedU select_u(int k, int n, double p, double target, long n_samples, std::uint64_t seed) {
    if (target <= 0.0 || target >= 1.0)
        throw std::invalid_argument("select_u: target must be in (0,1)");
    CrossingContext ctx(k, n);
    const int u_max = n / 3;
    for (int u = 0; u <= u_max; ++u)
        ctx.add_connect(ctx.geometry, box_region(u), boundary_region(n), /*unique=*/true);
    const BatteryResult r = run_battery(ctx.geometry, p, n_samples, seed, ctx.groups);
    SelectedU out;
    for (int u = 0; u <= u_max; ++u)
        out.estimates.push_back(make_estimate(r.hits[static_cast<std::size_t>(u)], n_samples, seed));
    out.flagged = true;
    for (int u = 0; u <= u_max; ++u) {
        if (out.estimates[static_cast<std::size_t>(u)].p_hat >= target) {
            out.u = u;
            out.flagged = false;
            break;
        }
    }
    if (out.flagged) {
        int best = 0;
        for (int u = 1; u <= u_max; ++u)
            if (out.estimates[static_cast<std::size_t>(u)].p_hat >
                out.estimates[static_cast<std::size_t>(best)].p_hat)
                best = u;
        out.u = best;
    }
    return out;
}

SelectedAlpha alpha_from_tables(const std::vector<double>& left, const std::vector<double>& right) {
    if (left.size() != right.size())
        throw std::invalid_argument("alpha_from_tables: table size mismatch");
    SelectedAlpha out;
    out.left = left;
    out.right = right;
    out.flagged = true;
    out.alpha = 1;
    for (int i = static_cast<int>(left.size()) - 1; i >= 0; --i) {
        if (left[static_cast<std::size_t>(i)] < right[static_cast<std::size_t>(i)]) {
            out.alpha = i + 1;
            out.flagged = false;
            break;
        }
    }
    return out;
}

SelectedAlpha select_alpha(int k, int n, int u, double p, long n_samples, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("select_alpha: n must be >= 2");
    check_u(n, u);
    CrossingContext ctx(k, n);
    const Region S = box_region(u);
    for (int a = 1; a <= n - 1; ++a) {
        ctx.add_connect(ctx.geometry, S, segment_region(n, 0, a - 1));
        ctx.add_connect(ctx.geometry, S, segment_region(n, a, n));
    }
    const BatteryResult r = run_battery(ctx.geometry, p, n_samples, seed, ctx.groups);
    std::vector<double> left, right;
    for (int a = 1; a <= n - 1; ++a) {
        left.push_back(static_cast<double>(r.hits[static_cast<std::size_t>(2 * (a - 1))]) /
                       static_cast<double>(n_samples));
        right.push_back(static_cast<double>(r.hits[static_cast<std::size_t>(2 * (a - 1) + 1)]) /
                        static_cast<double>(n_samples));
    }
    return alpha_from_tables(left, right);
}

double sqrt_trick_bound(double p_union, int m) {
    if (m < 1) throw std::invalid_argument("sqrt_trick_bound: m must be >= 1");
    if (p_union < 0.0 || p_union > 1.0)
        throw std::invalid_argument("sqrt_trick_bound: p outside [0,1]");
    return 1.0 - std::pow(1.0 - p_union, 1.0 / static_cast<double>(m));
}

SelectedY select_y(int k, int n, int alpha, int u, double p, long n_samples, std::uint64_t seed) {
    check_u(n, u);
    if (alpha < 1 || alpha > n - 1) throw std::invalid_argument("select_y: alpha out of range");
    const int h = alpha / 4;
    const int y_lo = alpha / 4;
    const int y_hi = 3 * alpha / 4;
    CrossingContext ctx(k, n);
    const Region S = box_region(u);
    ctx.add_connect(ctx.geometry, S, segment_region(n, y_lo - h, y_lo + h));
    ctx.add_connect(ctx.geometry, S, segment_region(n, y_hi - h, y_hi + h));
    ctx.add_connect(ctx.geometry, S, segment_region(n, 0, alpha));
    const std::vector<JointSpec> joints = {{0, 0, 0x3}};  // union of the two candidates
    const BatteryResult r = run_battery(ctx.geometry, p, n_samples, seed, ctx.groups, joints);
    SelectedY out;
    out.y_lo = y_lo;
    out.y_hi = y_hi;
    out.est_lo = make_estimate(r.hits[0], n_samples, seed);
    out.est_hi = make_estimate(r.hits[1], n_samples, seed);
    out.est_full = make_estimate(r.hits[2], n_samples, seed);
    out.est_union = make_estimate(r.joint_hits[0], n_samples, seed);
    out.y = out.est_lo.p_hat >= out.est_hi.p_hat ? y_lo : y_hi;  // ties to the smaller y
    out.sqrt_bound = sqrt_trick_bound(out.est_union.p_hat, 2);
    return out;
}

const SequenceRow* SequenceTable::row(int n) const {
    for (const auto& r : rows)
        if (r.n == n) return &r;
    return nullptr;
}

SequenceTable build_sequences(int k, const std::vector<int>& scales, double p, double target,
                              long n_samples, std::uint64_t seed) {
    SequenceTable table;
    for (int n : scales) {
        SequenceRow row;
        row.n = n;
        const SelectedU su = select_u(k, n, p, target, n_samples, seed);
        row.u = su.u;
        row.u_flagged = su.flagged;
        row.u_estimate = su.estimates[static_cast<std::size_t>(su.u)].p_hat;
        if (n >= 2) {
            const SelectedAlpha sa = select_alpha(k, n, row.u, p, n_samples, seed + 1);
            row.alpha = sa.alpha;
            row.alpha_flagged = sa.flagged;
            row.alpha_left = sa.left[static_cast<std::size_t>(sa.alpha - 1)];
            row.alpha_right = sa.right[static_cast<std::size_t>(sa.alpha - 1)];
            const SelectedY sy = select_y(k, n, row.alpha, row.u, p, n_samples, seed + 2);
            row.y = sy.y;
            row.y_estimate = sy.y == sy.y_lo ? sy.est_lo.p_hat : sy.est_hi.p_hat;
        } else {
            row.alpha = 1;
            row.alpha_flagged = true;
        }
        table.rows.push_back(row);
    }
    return table;
}

std::vector<int> feasible_scales(const SequenceTable& table, int n_max) {
    std::vector<int> out;
    for (const auto& r : table.rows) {
        if (r.n > n_max) continue;
        const SequenceRow* r3 = table.row(3 * r.n);
        if (r3 && r3->alpha <= 4 * r.alpha) out.push_back(r.n);
    }
    return out;
}

TripleResult estimate_triple(int k, int n, const SequenceTable& table, double p, long n_samples,
                             std::uint64_t seed) {
    const SequenceRow* rn = table.row(n);
    const SequenceRow* r3n = table.row(3 * n);
    if (!rn || !r3n)
        throw std::invalid_argument("estimate_triple: sequence table lacks scales n and 3n");
    TripleResult out;
    out.flagged = r3n->alpha > 4 * rn->alpha;

    BoxFamily fam;
    fam.n = n;
    fam.u = rn->u;
    fam.u3 = r3n->u;
    fam.alpha = rn->alpha;
    fam.y = r3n->y;
    const int y = fam.y;
    const Region B3 = fam.big_box();
    const Region S3 = fam.big_center();
    const Region Bp = fam.primed_box();
    const Region Sp = fam.primed_center();
    const Region Yplus = fam.y_plus();
    const Region Yminus = fam.y_minus();
    const Region Z = fam.z_segment();

    const PlanarBox wb{-3 * n, 3 * n, std::min(-3 * n, y - n), std::max(3 * n, y + n)};
    SlabGeometry g(k, wb);

    std::vector<BatteryGroup> groups(3);
    groups[0].graph = RegionGraph(g, B3);
    {
        CompiledEvent ev;
        ev.src = groups[0].graph.compact_lift(g, S3);
        ev.dst = groups[0].graph.compact_lift(g, Z);
        groups[0].events.push_back(std::move(ev));
    }
    groups[1].graph = RegionGraph(g, Bp);
    for (const Region* target : {&Yminus, &Yplus}) {
        CompiledEvent ev;
        ev.src = groups[1].graph.compact_lift(g, Sp);
        ev.dst = groups[1].graph.compact_lift(g, *target);
        groups[1].events.push_back(std::move(ev));
    }
    groups[2].graph = RegionGraph(g, box_region(n));
    {
        CompiledEvent ev;
        ev.src = groups[2].graph.compact_lift(g, box_region(rn->u));
        ev.dst = groups[2].graph.compact_lift(g, segment_region(n, 0, rn->alpha));
        groups[2].events.push_back(std::move(ev));
    }
    const std::vector<JointSpec> joints = {{0x7, 0, 0}};  // A and Y- and Y+
    const BatteryResult r = run_battery(g, p, n_samples, seed, groups, joints);
    out.arm_a = make_estimate(r.hits[0], n_samples, seed);
    out.arm_minus = make_estimate(r.hits[1], n_samples, seed);
    out.arm_plus = make_estimate(r.hits[2], n_samples, seed);
    out.crossing_small = make_estimate(r.hits[3], n_samples, seed);
    out.joint = make_estimate(r.joint_hits[0], n_samples, seed);
    out.harris_bound = out.arm_a.p_hat * out.crossing_small.p_hat * out.crossing_small.p_hat;
    return out;
}

double PcCurve::probability_at(double p) const {
    const auto it = std::lower_bound(thresholds.begin(), thresholds.end(), p);
    return static_cast<double>(it - thresholds.begin()) / static_cast<double>(thresholds.size());
}

PcCurve pc_curve(int k, int scale, long n_samples, std::uint64_t seed) {
    const int L = scale;
    SlabGeometry g(k, PlanarBox{0, 2 * L, 0, L});
    const int E = g.edge_count();
    std::vector<std::uint64_t> identities(static_cast<std::size_t>(E));
    for (int e = 0; e < E; ++e) identities[static_cast<std::size_t>(e)] = g.edge_identity(e);

    const std::vector<int> left = g.lift(segment_region(0, 0, L));
    const std::vector<int> right = g.lift(segment_region(2 * L, 0, L));
    const int SRC = g.vertex_count();
    const int SNK = g.vertex_count() + 1;

    PcCurve curve;
    curve.scale = scale;
    curve.thresholds.assign(static_cast<std::size_t>(n_samples), 1.0);

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        std::vector<double> u(static_cast<std::size_t>(E));
        std::vector<int> order(static_cast<std::size_t>(E));
        UnionFind uf;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (long s = 0; s < n_samples; ++s) {
            for (int e = 0; e < E; ++e)
                u[static_cast<std::size_t>(e)] = edge_uniform(
                    seed, static_cast<std::uint64_t>(s), identities[static_cast<std::size_t>(e)]);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return u[static_cast<std::size_t>(a)] < u[static_cast<std::size_t>(b)]; });
            uf.reset(g.vertex_count() + 2);
            for (int v : left) uf.unite(SRC, v);
            for (int v : right) uf.unite(SNK, v);
            for (int e : order) {
                uf.unite(g.edge(e).a, g.edge(e).b);
                if (uf.find(SRC) == uf.find(SNK)) {
                    curve.thresholds[static_cast<std::size_t>(s)] = u[static_cast<std::size_t>(e)];
                    break;
                }
            }
        }
    }
    std::sort(curve.thresholds.begin(), curve.thresholds.end());
    return curve;
}

namespace {

// Intersection of two empirical curves on the grid: first sign change of the
// difference, linearly interpolated. Returns false when the curves do not
// cross on the grid.
bool curve_intersection(const std::vector<double>& grid, const std::vector<double>& a,
                        const std::vector<double>& b, double& out) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double d0 = a[i] - b[i];
        const double d1 = a[i + 1] - b[i + 1];
        if (d0 == 0.0) {
            out = grid[i];
            return true;
        }
        if ((d0 > 0.0) != (d1 > 0.0)) {
            const double t = d0 / (d0 - d1);
            out = grid[i] + t * (grid[i + 1] - grid[i]);
            return true;
        }
    }
    // Fallback: the point of closest approach.
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(a[i] - b[i]) < std::abs(a[best] - b[best])) best = i;
    out = grid[best];
    return false;
}

}  // namespace

PcResult estimate_pc(int k, const std::vector<int>& scales, const std::vector<double>& grid,
                     long n_samples, std::uint64_t seed) {
    if (scales.size() < 2) throw std::invalid_argument("estimate_pc: need at least 2 scales");
    if (grid.size() < 2) throw std::invalid_argument("estimate_pc: need a grid");
    PcResult out;
    out.grid = grid;
    for (std::size_t i = 0; i < scales.size(); ++i)
        out.curves.push_back(pc_curve(k, scales[i], n_samples, seed + i));

    // Bucket of each sample: first grid index whose p exceeds the threshold.
    const std::size_t G = grid.size();
    auto curve_values = [&](const std::vector<long>& hist) {
        std::vector<double> vals(G);
        long acc = 0;
        for (std::size_t j = 0; j < G; ++j) {
            acc += hist[j];
            vals[j] = static_cast<double>(acc) / static_cast<double>(n_samples);
        }
        return vals;
    };
    std::vector<std::vector<int>> buckets(scales.size());
    std::vector<std::vector<long>> hist(scales.size());
    std::vector<std::vector<double>> values(scales.size());
    for (std::size_t i = 0; i < scales.size(); ++i) {
        buckets[i].resize(static_cast<std::size_t>(n_samples));
        hist[i].assign(G + 1, 0);
        for (long s = 0; s < n_samples; ++s) {
            const double th = out.curves[i].thresholds[static_cast<std::size_t>(s)];
            const auto it = std::upper_bound(grid.begin(), grid.end(), th);
            const int b = static_cast<int>(it - grid.begin());  // counts toward grid[j] > th
            buckets[i][static_cast<std::size_t>(s)] = b;
            ++hist[i][static_cast<std::size_t>(b)];
        }
        // hist index G means "beyond the grid".
        std::vector<long> h(G, 0);
        for (std::size_t j = 0; j < G; ++j) h[j] = hist[i][j];
        values[i] = curve_values(h);
    }

    bool all_crossed = true;
    for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
        double x = 0.0;
        all_crossed &= curve_intersection(grid, values[i], values[i + 1], x);
        out.pair_estimates.push_back(x);
    }
    out.flagged = !all_crossed;
    out.pc = std::accumulate(out.pair_estimates.begin(), out.pair_estimates.end(), 0.0) /
             static_cast<double>(out.pair_estimates.size());

    // Bootstrap over samples (1000 resamples), deterministic.
    const int B = 1000;
    std::vector<double> boot(B);
    std::vector<long> h(G, 0);
    for (int b = 0; b < B; ++b) {
        double acc = 0.0;
        std::vector<std::vector<double>> vals(scales.size());
        for (std::size_t i = 0; i < scales.size(); ++i) {
            CounterRng rng(seed, 0xB007ULL + static_cast<std::uint64_t>(b) * 131 + i);
            std::fill(h.begin(), h.end(), 0);
            for (long s = 0; s < n_samples; ++s) {
                const int bk = buckets[i][static_cast<std::size_t>(rng.next_below(
                    static_cast<std::uint64_t>(n_samples)))];
                if (bk < static_cast<int>(G)) ++h[static_cast<std::size_t>(bk)];
            }
            vals[i] = curve_values(h);
        }
        int used = 0;
        for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
            double x = 0.0;
            curve_intersection(grid, vals[i], vals[i + 1], x);
            acc += x;
            ++used;
        }
        boot[static_cast<std::size_t>(b)] = acc / static_cast<double>(used);
    }
    std::sort(boot.begin(), boot.end());
    out.ci_low = boot[static_cast<std::size_t>(0.025 * B)];
    out.ci_high = boot[static_cast<std::size_t>(0.975 * B) - 1];
    return out;
}

}  // namespace slabperc
