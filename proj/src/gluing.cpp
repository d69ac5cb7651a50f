#include "slabperc/gluing.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <cstring>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace slabperc {

int emanating_rank(const SlabGeometry& g, int v, int w) {
    for (int d = 0; d < 6; ++d)
        if (g.neighbor(v, static_cast<EdgeDir>(d)) == w) return d;
    throw std::invalid_argument("emanating_rank: vertices not adjacent");
}

PathCmp compare_paths(const SlabGeometry& g, const Path& a, const Path& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("compare_paths: empty path");
    if (a.vertices == b.vertices) return PathCmp::Equal;
    if (a.front() != b.front())
        return a.front() < b.front() ? PathCmp::Less : PathCmp::Greater;
    const std::size_t m = std::min(a.vertices.size(), b.vertices.size());
    for (std::size_t i = 1; i < m; ++i) {
        if (a.vertices[i] != b.vertices[i]) {
            const int ra = emanating_rank(g, a.vertices[i - 1], a.vertices[i]);
            const int rb = emanating_rank(g, b.vertices[i - 1], b.vertices[i]);
            return ra < rb ? PathCmp::Less : PathCmp::Greater;
        }
    }
    return a.vertices.size() < b.vertices.size() ? PathCmp::Less : PathCmp::Greater;
}

namespace {

struct PathSearchScratch {
    std::vector<char> in_region;
    std::vector<char> in_target;
    std::vector<char> visited;
    UnionFind uf;
    std::vector<char> target_root;
};

void build_region_flags(const SlabGeometry& g, const Region& r, std::vector<char>& out) {
    out.assign(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : g.lift(r)) out[static_cast<std::size_t>(v)] = 1;
}

void check_sub(const Region& sub, const Region& ambient, const char* what) {
    if (!ambient.contains_region(sub))
        throw std::invalid_argument(std::string("min_path: ") + what + " not inside ambient region");
}

}  // namespace

std::optional<Path> min_path(const SlabGeometry& g, const Configuration& c, const Region& source,
                             const Region& target, const Region& ambient) {
    check_sub(source, ambient, "source");
    check_sub(target, ambient, "target");
    PathSearchScratch sc;
    build_region_flags(g, ambient, sc.in_region);
    build_region_flags(g, target, sc.in_target);

    // Cluster pruning: a vertex can only reach the target if its open cluster
    // (within the ambient region) meets the target.
    sc.uf.reset(g.vertex_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!c.open(e)) continue;
        const auto& ed = g.edge(e);
        if (sc.in_region[static_cast<std::size_t>(ed.a)] && sc.in_region[static_cast<std::size_t>(ed.b)])
            sc.uf.unite(ed.a, ed.b);
    }
    sc.target_root.assign(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v = 0; v < g.vertex_count(); ++v)
        if (sc.in_target[static_cast<std::size_t>(v)])
            sc.target_root[static_cast<std::size_t>(sc.uf.find(v))] = 1;

    sc.visited.assign(static_cast<std::size_t>(g.vertex_count()), 0);
    std::vector<int> path;
    struct Frame {
        int vertex;
        int dir;
    };
    std::vector<Frame> stack;

    for (int s : g.lift(source)) {
        if (!sc.in_region[static_cast<std::size_t>(s)]) continue;
        if (sc.in_target[static_cast<std::size_t>(s)]) return Path{{s}};
        if (!sc.target_root[static_cast<std::size_t>(sc.uf.find(s))]) continue;
        path.clear();
        stack.clear();
        path.push_back(s);
        sc.visited[static_cast<std::size_t>(s)] = 1;
        stack.push_back({s, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            bool advanced = false;
            while (f.dir < 6) {
                const int d = f.dir++;
                const int w = g.neighbor(f.vertex, static_cast<EdgeDir>(d));
                if (w < 0 || !sc.in_region[static_cast<std::size_t>(w)] ||
                    sc.visited[static_cast<std::size_t>(w)])
                    continue;
                if (!c.open(g.incident_edge(f.vertex, static_cast<EdgeDir>(d)))) continue;
                if (!sc.target_root[static_cast<std::size_t>(sc.uf.find(w))]) continue;
                if (sc.in_target[static_cast<std::size_t>(w)]) {
                    path.push_back(w);
                    return Path{path};
                }
                path.push_back(w);
                sc.visited[static_cast<std::size_t>(w)] = 1;
                stack.push_back({w, 0});
                advanced = true;
                break;
            }
            if (!advanced) {
                sc.visited[static_cast<std::size_t>(stack.back().vertex)] = 0;
                stack.pop_back();
                path.pop_back();
            }
        }
        sc.visited[static_cast<std::size_t>(s)] = 0;
    }
    return std::nullopt;
}

std::optional<Path> min_path_bruteforce(const SlabGeometry& g, const Configuration& c,
                                        const Region& source, const Region& target,
                                        const Region& ambient) {
    check_sub(source, ambient, "source");
    check_sub(target, ambient, "target");
    std::vector<char> in_region, in_target, visited;
    build_region_flags(g, ambient, in_region);
    build_region_flags(g, target, in_target);
    visited.assign(static_cast<std::size_t>(g.vertex_count()), 0);

    std::optional<Path> best;
    std::vector<int> path;
    auto consider = [&]() {
        Path cand{path};
        if (!best || compare_paths(g, cand, *best) == PathCmp::Less) best = std::move(cand);
    };
    // Recursive enumeration; neighbors in reverse direction order so the
    // visit order differs from min_path's. A path is recorded at its first
    // target touch; extensions past the target cannot beat their own prefix.
    std::function<void(int)> extend = [&](int v) {
        if (in_target[static_cast<std::size_t>(v)]) {
            consider();
            return;
        }
        for (int d = 5; d >= 0; --d) {
            const int w = g.neighbor(v, static_cast<EdgeDir>(d));
            if (w < 0 || !in_region[static_cast<std::size_t>(w)] ||
                visited[static_cast<std::size_t>(w)])
                continue;
            if (!c.open(g.incident_edge(v, static_cast<EdgeDir>(d)))) continue;
            visited[static_cast<std::size_t>(w)] = 1;
            path.push_back(w);
            extend(w);
            path.pop_back();
            visited[static_cast<std::size_t>(w)] = 0;
        }
    };
    std::vector<int> starts = g.lift(source);
    std::reverse(starts.begin(), starts.end());
    for (int s : starts) {
        if (!in_region[static_cast<std::size_t>(s)]) continue;
        visited[static_cast<std::size_t>(s)] = 1;
        path.assign(1, s);
        extend(s);
        visited[static_cast<std::size_t>(s)] = 0;
    }
    return best;
}

namespace {

std::vector<PlanarPoint> projection_cells(const SlabGeometry& g, const Path& path) {
    std::vector<PlanarPoint> cells;
    for (int v : path.vertices) {
        const SlabVertex sv = g.vertex(v);
        cells.push_back({sv.x, sv.y});
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

int l1(PlanarPoint a, PlanarPoint b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

}  // namespace

std::vector<PlanarPoint> compute_U(const SlabGeometry& g, const Configuration& c,
                                   const Path& gamma_min, const Region& Bprime,
                                   const Region& Sprime) {
    std::vector<PlanarPoint> U;
    if (gamma_min.empty()) return U;
    const std::vector<PlanarPoint> shadow = projection_cells(g, gamma_min);
    const Region shadow_region(shadow);

    // Per-vertex flags: allowed (projection avoids the shadow), at distance
    // exactly one, in the lifted S'.
    const int n = g.vertex_count();
    std::vector<char> allowed(static_cast<std::size_t>(n), 0), dist1(static_cast<std::size_t>(n), 0),
        in_sprime(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
        const SlabVertex sv = g.vertex(v);
        const PlanarPoint pp{sv.x, sv.y};
        int dmin = INT32_MAX;
        for (PlanarPoint q : shadow) dmin = std::min(dmin, l1(pp, q));
        allowed[static_cast<std::size_t>(v)] = dmin >= 1;
        dist1[static_cast<std::size_t>(v)] = dmin == 1;
    }
    for (int v : g.lift(Sprime)) in_sprime[static_cast<std::size_t>(v)] = 1;

    // Component prefilter on the allowed open subgraph.
    UnionFind uf;
    uf.reset(n);
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!c.open(e)) continue;
        const auto& ed = g.edge(e);
        if (allowed[static_cast<std::size_t>(ed.a)] && allowed[static_cast<std::size_t>(ed.b)])
            uf.unite(ed.a, ed.b);
    }
    std::vector<char> comp_sprime(static_cast<std::size_t>(n), 0),
        comp_dist1(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
        if (!allowed[static_cast<std::size_t>(v)]) continue;
        const int r = uf.find(v);
        if (in_sprime[static_cast<std::size_t>(v)]) comp_sprime[static_cast<std::size_t>(r)] = 1;
        if (dist1[static_cast<std::size_t>(v)]) comp_dist1[static_cast<std::size_t>(r)] = 1;
    }

    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    // Backtracking search for a self-avoiding open path through the allowed
    // subgraph that ends in the lifted S' and touches distance one.
    std::function<bool(int, bool)> dfs = [&](int v, bool touched) -> bool {
        touched = touched || dist1[static_cast<std::size_t>(v)];
        if (in_sprime[static_cast<std::size_t>(v)] && touched) return true;
        for (int d = 0; d < 6; ++d) {
            const int w = g.neighbor(v, static_cast<EdgeDir>(d));
            if (w < 0 || !allowed[static_cast<std::size_t>(w)] ||
                visited[static_cast<std::size_t>(w)])
                continue;
            if (!c.open(g.incident_edge(v, static_cast<EdgeDir>(d)))) continue;
            visited[static_cast<std::size_t>(w)] = 1;
            const bool found = dfs(w, touched);
            visited[static_cast<std::size_t>(w)] = 0;
            if (found) return true;
        }
        return false;
    };

    for (PlanarPoint z : Bprime.cells()) {
        if (!shadow_region.contains(z)) continue;  // P1
        bool found = false;
        for (int dx = -1; dx <= 1 && !found; ++dx) {
            for (int dy = -1; dy <= 1 && !found; ++dy) {
                const PlanarPoint cell{z.x + dx, z.y + dy};
                if (!g.window().contains(cell)) continue;
                for (int l = 0; l <= g.k() && !found; ++l) {
                    const int v = g.vertex_id({cell.x, cell.y, l});
                    if (!allowed[static_cast<std::size_t>(v)]) continue;
                    const int r = uf.find(v);
                    if (!comp_sprime[static_cast<std::size_t>(r)] ||
                        !comp_dist1[static_cast<std::size_t>(r)])
                        continue;
                    visited[static_cast<std::size_t>(v)] = 1;
                    found = dfs(v, false);
                    visited[static_cast<std::size_t>(v)] = 0;
                }
            }
        }
        if (found) U.push_back(z);
    }
    return U;
}

std::vector<int> edges_adjacent_to_columns(const SlabGeometry& g,
                                           const std::vector<PlanarPoint>& cells) {
    const Region r(cells);
    std::vector<char> in_col(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : g.lift(r)) in_col[static_cast<std::size_t>(v)] = 1;
    std::vector<int> out;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        if (in_col[static_cast<std::size_t>(ed.a)] || in_col[static_cast<std::size_t>(ed.b)])
            out.push_back(e);
    }
    return out;
}

Configuration surgery_phi(const SlabGeometry& g, const Configuration& c,
                          const std::vector<PlanarPoint>& U, const Region& Sprime) {
    // W: vertices joined to the lifted S' by an open path anywhere in the
    // geometry.
    UnionFind uf;
    uf.reset(g.vertex_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!c.open(e)) continue;
        uf.unite(g.edge(e).a, g.edge(e).b);
    }
    std::vector<char> w_root(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : g.lift(Sprime)) w_root[static_cast<std::size_t>(uf.find(v))] = 1;

    const Region ucols(U);
    std::vector<char> in_col(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : g.lift(ucols)) in_col[static_cast<std::size_t>(v)] = 1;

    Configuration out = c;
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!c.open(e)) continue;
        const auto& ed = g.edge(e);
        const bool ab = in_col[static_cast<std::size_t>(ed.a)] &&
                        w_root[static_cast<std::size_t>(uf.find(ed.b))];
        const bool ba = in_col[static_cast<std::size_t>(ed.b)] &&
                        w_root[static_cast<std::size_t>(uf.find(ed.a))];
        if (ab || ba) out.set(e, false);
    }
    return out;
}

namespace {

// Unit-capacity max-flow on a vertex-split box graph; enough for flow <= 3.
class TripleFlow {
public:
    TripleFlow(int n_nodes) : head_(static_cast<std::size_t>(n_nodes), -1) {}
    void add_edge(int a, int b, int cap) {
        to_.push_back(b);
        next_.push_back(head_[static_cast<std::size_t>(a)]);
        cap_.push_back(cap);
        head_[static_cast<std::size_t>(a)] = static_cast<int>(to_.size()) - 1;
        to_.push_back(a);
        next_.push_back(head_[static_cast<std::size_t>(b)]);
        cap_.push_back(0);
        head_[static_cast<std::size_t>(b)] = static_cast<int>(to_.size()) - 1;
    }
    int max_flow(int s, int t, int want) {
        int flow = 0;
        std::vector<int> pre(head_.size()), pre_edge(head_.size());
        while (flow < want) {
            std::fill(pre.begin(), pre.end(), -1);
            std::deque<int> q{s};
            pre[static_cast<std::size_t>(s)] = s;
            while (!q.empty() && pre[static_cast<std::size_t>(t)] < 0) {
                const int v = q.front();
                q.pop_front();
                for (int ei = head_[static_cast<std::size_t>(v)]; ei >= 0;
                     ei = next_[static_cast<std::size_t>(ei)]) {
                    const int w = to_[static_cast<std::size_t>(ei)];
                    if (cap_[static_cast<std::size_t>(ei)] > 0 && pre[static_cast<std::size_t>(w)] < 0) {
                        pre[static_cast<std::size_t>(w)] = v;
                        pre_edge[static_cast<std::size_t>(w)] = ei;
                        q.push_back(w);
                    }
                }
            }
            if (pre[static_cast<std::size_t>(t)] < 0) break;
            for (int v = t; v != s; v = pre[static_cast<std::size_t>(v)]) {
                const int ei = pre_edge[static_cast<std::size_t>(v)];
                --cap_[static_cast<std::size_t>(ei)];
                ++cap_[static_cast<std::size_t>(ei ^ 1)];
            }
            ++flow;
        }
        return flow;
    }

private:
    std::vector<int> head_, to_, next_, cap_;
};

}  // namespace

bool disjoint_triples_feasible(int k, int R) {
    SlabGeometry box(k, PlanarBox{-R, R, -R, R});
    const Region ring = boundary_region(R);
    const std::vector<int> boundary = box.lift(ring);

    for (int lz = 0; lz <= k; ++lz) {
        const int z = box.vertex_id({0, 0, lz});
        std::vector<int> nbrs;
        for (int d = 0; d < 6; ++d) {
            const int w = box.neighbor(z, static_cast<EdgeDir>(d));
            if (w >= 0) nbrs.push_back(w);
        }
        const int nn = static_cast<int>(nbrs.size());
        const int nb = static_cast<int>(boundary.size());
        // All unordered neighbor triples against all unordered boundary
        // triples; flow value 3 certifies a disjoint linkage of the sets.
        for (int i = 0; i < nn; ++i)
            for (int j = i + 1; j < nn; ++j)
                for (int l = j + 1; l < nn; ++l)
                    for (int a = 0; a < nb; ++a)
                        for (int b = a + 1; b < nb; ++b)
                            for (int cc = b + 1; cc < nb; ++cc) {
                                const int N = box.vertex_count();
                                TripleFlow f(2 * N + 2);
                                const int S = 2 * N, T = 2 * N + 1;
                                for (int v = 0; v < N; ++v)
                                    if (v != z) f.add_edge(2 * v, 2 * v + 1, 1);
                                for (int e = 0; e < box.edge_count(); ++e) {
                                    const auto& ed = box.edge(e);
                                    if (ed.a == z || ed.b == z) continue;
                                    f.add_edge(2 * ed.a + 1, 2 * ed.b, 1);
                                    f.add_edge(2 * ed.b + 1, 2 * ed.a, 1);
                                }
                                for (int u : {nbrs[static_cast<std::size_t>(i)],
                                              nbrs[static_cast<std::size_t>(j)],
                                              nbrs[static_cast<std::size_t>(l)]})
                                    f.add_edge(S, 2 * u, 1);
                                for (int u : {boundary[static_cast<std::size_t>(a)],
                                              boundary[static_cast<std::size_t>(b)],
                                              boundary[static_cast<std::size_t>(cc)]})
                                    f.add_edge(2 * u + 1, T, 1);
                                if (f.max_flow(S, T, 3) < 3) return false;
                            }
    }
    return true;
}

int feasible_R(int k, int r_max) {
    if (k < 1)
        throw std::invalid_argument("feasible_R: k = 0 is the trivial planar case");
    for (int R = 2; R <= r_max; ++R)
        if (disjoint_triples_feasible(k, R)) return R;
    throw std::runtime_error("feasible_R: no feasible R up to the probe limit");
}

namespace {

// Deterministic search for pairwise vertex-disjoint paths with fixed
// endpoints inside an allowed vertex set. Paths may be single vertices.
class DisjointPathSearch {
public:
    DisjointPathSearch(const SlabGeometry& g, const std::vector<char>& allowed)
        : g_(g), allowed_(allowed), used_(allowed.size(), 0) {}

    /// pairs[i] = (start, goal); forbidden[i] excludes extra vertices for
    /// path i (endpoint exemptions are the caller's business).
    bool run(const std::vector<std::pair<int, int>>& pairs,
             const std::vector<const std::vector<char>*>& forbidden,
             std::vector<std::vector<int>>& out) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto [s, t] = pairs[i];
            if (s < 0 || t < 0 || !allowed_[static_cast<std::size_t>(s)] ||
                !allowed_[static_cast<std::size_t>(t)])
                return false;
            if ((*forbidden[i])[static_cast<std::size_t>(s)] ||
                (*forbidden[i])[static_cast<std::size_t>(t)])
                return false;
        }
        std::fill(used_.begin(), used_.end(), 0);
        pairs_ = pairs;
        forbidden_ = forbidden;
        out.assign(pairs.size(), {});
        return search(0, out);
    }

private:
    bool search(std::size_t idx, std::vector<std::vector<int>>& out) {
        if (idx == pairs_.size()) return true;
        auto& slot = out[idx];
        const auto [s, t] = pairs_[idx];
        if (used_[static_cast<std::size_t>(s)]) return false;
        slot.assign(1, s);
        used_[static_cast<std::size_t>(s)] = 1;
        const bool ok = extend(idx, s, t, slot, out);
        if (!ok) used_[static_cast<std::size_t>(s)] = 0;
        return ok;
    }

    bool extend(std::size_t idx, int v, int t, std::vector<int>& slot,
                std::vector<std::vector<int>>& out) {
        if (v == t) return search(idx + 1, out);
        for (int d = 0; d < 6; ++d) {
            const int w = g_.neighbor(v, static_cast<EdgeDir>(d));
            if (w < 0 || !allowed_[static_cast<std::size_t>(w)] ||
                used_[static_cast<std::size_t>(w)])
                continue;
            if ((*forbidden_[idx])[static_cast<std::size_t>(w)] && w != t) continue;
            used_[static_cast<std::size_t>(w)] = 1;
            slot.push_back(w);
            if (extend(idx, w, t, slot, out)) return true;
            slot.pop_back();
            used_[static_cast<std::size_t>(w)] = 0;
        }
        return false;
    }

    const SlabGeometry& g_;
    const std::vector<char>& allowed_;
    std::vector<char> used_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<const std::vector<char>*> forbidden_;
};

Region clipped_box(const SlabGeometry& g, PlanarPoint z, int radius) {
    const PlanarBox w = g.window();
    return rect_region(std::max(w.xmin, z.x - radius), std::min(w.xmax, z.x + radius),
                       std::max(w.ymin, z.y - radius), std::min(w.ymax, z.y + radius));
}

}  // namespace

PsiResult surgery_psi_at_site(const SlabGeometry& g, const Configuration& c, PlanarPoint z,
                              int z_site, int R, const GluingInstance& inst,
                              const Path& gamma_min);

PsiResult surgery_psi(const SlabGeometry& g, const Configuration& c, PlanarPoint z, int R,
                      const GluingInstance& inst, const Path& gamma_min) {
    PsiResult res;
    auto fail = [&](const std::string& why) {
        res.ok = false;
        res.error = why;
        return res;
    };
    if (gamma_min.empty()) return fail("gamma_min absent");

    // Candidate surgery sites: the gamma_min vertices in the column of z
    // (two when the path steps vertically there). The first site admitting
    // the construction wins.
    std::vector<int> sites;
    for (int v : gamma_min.vertices) {
        const SlabVertex sv = g.vertex(v);
        if (sv.x == z.x && sv.y == z.y) sites.push_back(v);
    }
    std::sort(sites.begin(), sites.end());
    if (sites.empty()) return fail("z is not on the projection of gamma_min");
    std::string last_error = "no candidate site";
    for (int z_site : sites) {
        PsiResult attempt = surgery_psi_at_site(g, c, z, z_site, R, inst, gamma_min);
        if (attempt.ok) return attempt;
        last_error = attempt.error;
    }
    return fail(last_error);
}

PsiResult surgery_psi_at_site(const SlabGeometry& g, const Configuration& c, PlanarPoint z,
                              int z_site, int R, const GluingInstance& inst,
                              const Path& gamma_min) {
    PsiResult res;
    auto fail = [&](const std::string& why) {
        res.ok = false;
        res.error = why;
        return res;
    };

    const Region box = clipped_box(g, z, R);
    const Region box1 = clipped_box(g, z, R + 1);
    std::vector<char> in_box, in_box1, in_sprime;
    build_region_flags(g, box, in_box);
    build_region_flags(g, box1, in_box1);
    build_region_flags(g, inst.Sprime, in_sprime);

    // First and last gamma_min vertices inside the lifted box.
    int iu = -1, iv = -1;
    for (std::size_t i = 0; i < gamma_min.vertices.size(); ++i) {
        if (in_box[static_cast<std::size_t>(gamma_min.vertices[i])]) {
            if (iu < 0) iu = static_cast<int>(i);
            iv = static_cast<int>(i);
        }
    }
    if (iu < 0 || iu == iv) return fail("gamma_min meets the box at fewer than two vertices");
    const int u_prime = gamma_min.vertices[static_cast<std::size_t>(iu)];
    const int v_prime = gamma_min.vertices[static_cast<std::size_t>(iv)];

    // Ring vertices of the box, in vertex order.
    std::vector<int> ring;
    {
        const Region inner = R >= 1 ? clipped_box(g, z, R - 1) : Region();
        for (int v : g.lift(box)) {
            const SlabVertex sv = g.vertex(v);
            if (!inner.contains({sv.x, sv.y})) ring.push_back(v);
        }
    }

    // w' on the ring with an open path pi to the lifted S' whose vertices,
    // except w' itself, stay outside the box. A ring vertex already in the
    // lifted S' qualifies with the trivial path.
    int w_prime = -1;
    std::vector<int> pi;
    for (int r : ring) {
        if (in_sprime[static_cast<std::size_t>(r)]) {
            w_prime = r;
            pi.assign(1, r);
            break;
        }
        // BFS outward from r over open edges through outside-box vertices.
        std::vector<int> parent(static_cast<std::size_t>(g.vertex_count()), -2);
        parent[static_cast<std::size_t>(r)] = -1;
        std::deque<int> q{r};
        int hit = -1;
        while (!q.empty() && hit < 0) {
            const int v = q.front();
            q.pop_front();
            for (int d = 0; d < 6 && hit < 0; ++d) {
                const int w = g.neighbor(v, static_cast<EdgeDir>(d));
                if (w < 0 || parent[static_cast<std::size_t>(w)] != -2) continue;
                if (in_box[static_cast<std::size_t>(w)]) continue;
                if (!c.open(g.incident_edge(v, static_cast<EdgeDir>(d)))) continue;
                parent[static_cast<std::size_t>(w)] = v;
                if (in_sprime[static_cast<std::size_t>(w)]) hit = w;
                q.push_back(w);
            }
        }
        if (hit >= 0) {
            for (int v = hit; v >= 0; v = parent[static_cast<std::size_t>(v)]) pi.push_back(v);
            std::reverse(pi.begin(), pi.end());
            w_prime = r;
            break;
        }
    }
    if (w_prime < 0) return fail("no boundary vertex reaches the lifted S'");
    if (w_prime == u_prime || w_prime == v_prime)
        return fail("w' coincides with u' or v' (configuration outside X)");

    if (u_prime == z_site) return fail("gamma_min starts at the surgery site");
    // When gamma_min terminates at the surgery site itself (z on the target
    // line), the rerouted minimal path ends at the site, so no continuation
    // through v exists and two disjoint paths suffice.
    const bool terminal = v_prime == z_site;

    // Neighbor assignment: (z,v) strictly before (z,w) in the emanating
    // order; the first assignment admitting a disjoint system inside the box
    // minus the site wins.
    std::array<int, 6> nbr;
    std::vector<int> dirs;
    for (int d = 0; d < 6; ++d) {
        nbr[static_cast<std::size_t>(d)] = g.neighbor(z_site, static_cast<EdgeDir>(d));
        if (nbr[static_cast<std::size_t>(d)] >= 0) dirs.push_back(d);
    }
    if (dirs.size() < (terminal ? 2u : 3u)) return fail("site has too few neighbors");

    std::vector<char> allowed(in_box.begin(), in_box.end());
    allowed[static_cast<std::size_t>(z_site)] = 0;

    // The rewiring paths must not create connection structure of their own:
    // a path vertex in the lifted Z (other than v') would end the rerouted
    // minimal path early, one in the lifted S' (other than w') would mark a
    // second gluing site, and one in the lifted source at or below the old
    // start would move the start of the minimal path.
    std::vector<char> in_Z, in_source;
    build_region_flags(g, inst.Z, in_Z);
    build_region_flags(g, inst.source, in_source);
    const int old_start = gamma_min.vertices.front();
    std::vector<char> forbid_u(static_cast<std::size_t>(g.vertex_count()), 0),
        forbid_v = forbid_u, forbid_w = forbid_u;
    for (int v = 0; v < g.vertex_count(); ++v) {
        const bool low_source = in_source[static_cast<std::size_t>(v)] && v <= old_start;
        forbid_u[static_cast<std::size_t>(v)] =
            in_sprime[static_cast<std::size_t>(v)] || in_Z[static_cast<std::size_t>(v)] || low_source;
        forbid_v[static_cast<std::size_t>(v)] =
            in_sprime[static_cast<std::size_t>(v)] || in_Z[static_cast<std::size_t>(v)] || low_source;
        forbid_w[static_cast<std::size_t>(v)] = low_source;
    }
    forbid_u[static_cast<std::size_t>(u_prime)] = 0;
    forbid_v[static_cast<std::size_t>(v_prime)] = 0;

    DisjointPathSearch search(g, allowed);
    std::vector<std::vector<int>> paths;
    int du = -1, dv = -1, dw = -1;
    if (terminal) {
        for (std::size_t a = 0; a < dirs.size() && du < 0; ++a) {
            for (std::size_t b = 0; b < dirs.size() && du < 0; ++b) {
                if (a == b) continue;
                const std::vector<std::pair<int, int>> pairs = {
                    {nbr[static_cast<std::size_t>(dirs[a])], u_prime},
                    {nbr[static_cast<std::size_t>(dirs[b])], w_prime}};
                if (search.run(pairs, {&forbid_u, &forbid_w}, paths)) {
                    du = dirs[a];
                    dw = dirs[b];
                }
            }
        }
    } else {
        // (z,v) strictly before (z,w); u ranges over the remaining
        // directions in rank order until the disjoint system exists.
        for (std::size_t a = 0; a < dirs.size() && du < 0; ++a) {
            for (std::size_t b = a + 1; b < dirs.size() && du < 0; ++b) {
                const int cand_v = dirs[a], cand_w = dirs[b];  // rank(v) < rank(w)
                for (int cand_u : dirs) {
                    if (cand_u == cand_v || cand_u == cand_w) continue;
                    const std::vector<std::pair<int, int>> pairs = {
                        {nbr[static_cast<std::size_t>(cand_u)], u_prime},
                        {nbr[static_cast<std::size_t>(cand_v)], v_prime},
                        {nbr[static_cast<std::size_t>(cand_w)], w_prime}};
                    if (search.run(pairs, {&forbid_u, &forbid_v, &forbid_w}, paths)) {
                        du = cand_u;
                        dv = cand_v;
                        dw = cand_w;
                        break;
                    }
                }
            }
        }
    }
    if (du < 0) return fail("no disjoint rewiring system inside the box");

    // Step 2 closes every open edge of the lifted B_{R+1} box except
    // gamma_min/pi edges that keep one endpoint outside the lifted B_R box;
    // step 3 opens the spokes and the three paths.
    std::vector<char> keep(static_cast<std::size_t>(g.edge_count()), 0);
    auto mark_path_edges = [&](const std::vector<int>& path) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const int e = g.edge_between(path[i], path[i + 1]);
            if (e >= 0) keep[static_cast<std::size_t>(e)] = 1;
        }
    };
    mark_path_edges(gamma_min.vertices);
    mark_path_edges(pi);

    Configuration out = c;
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!c.open(e)) continue;
        const auto& ed = g.edge(e);
        if (!in_box1[static_cast<std::size_t>(ed.a)] || !in_box1[static_cast<std::size_t>(ed.b)])
            continue;
        const bool shell_exempt = keep[static_cast<std::size_t>(e)] &&
                                  (!in_box[static_cast<std::size_t>(ed.a)] ||
                                   !in_box[static_cast<std::size_t>(ed.b)]);
        if (!shell_exempt) out.set(e, false);
    }
    auto open_path = [&](const std::vector<int>& path) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            out.set(g.edge_between(path[i], path[i + 1]), true);
    };
    out.set(g.incident_edge(z_site, static_cast<EdgeDir>(du)), true);
    out.set(g.incident_edge(z_site, static_cast<EdgeDir>(dw)), true);
    if (!terminal) out.set(g.incident_edge(z_site, static_cast<EdgeDir>(dv)), true);
    for (const auto& path : paths) open_path(path);

    res.ok = true;
    res.result = out;
    res.record.source_config = dump_portable(g, c);
    res.record.gamma_min = gamma_min.vertices;
    res.record.z = z;
    res.record.z_site = z_site;
    res.record.u = nbr[static_cast<std::size_t>(du)];
    res.record.v = terminal ? -1 : nbr[static_cast<std::size_t>(dv)];
    res.record.w = nbr[static_cast<std::size_t>(dw)];
    res.record.u_prime = u_prime;
    res.record.v_prime = v_prime;
    res.record.w_prime = w_prime;
    res.record.path_u = paths[0];
    res.record.path_v = terminal ? std::vector<int>{} : paths[1];
    res.record.path_w = terminal ? paths[1] : paths[2];
    res.record.pi = pi;
    for (int e = 0; e < g.edge_count(); ++e) {
        if (c.open(e) && !out.open(e)) res.record.closed.push_back(e);
        if (!c.open(e) && out.open(e)) res.record.opened.push_back(e);
    }
    return res;
}

int recover_marked_site(const SlabGeometry& g, const Configuration& c,
                        const GluingInstance& inst) {
    const auto gm = min_path(g, c, inst.source, inst.Z, inst.ambient);
    if (!gm) return -1;
    std::vector<char> gamma_edge(static_cast<std::size_t>(g.edge_count()), 0);
    for (std::size_t i = 0; i + 1 < gm->vertices.size(); ++i) {
        const int e = g.edge_between(gm->vertices[i], gm->vertices[i + 1]);
        gamma_edge[static_cast<std::size_t>(e)] = 1;
    }
    UnionFind uf;
    uf.reset(g.vertex_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!c.open(e) || gamma_edge[static_cast<std::size_t>(e)]) continue;
        uf.unite(g.edge(e).a, g.edge(e).b);
    }
    std::vector<char> sp_root(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : g.lift(inst.Sprime)) sp_root[static_cast<std::size_t>(uf.find(v))] = 1;
    int site = -1;
    for (int v : gm->vertices) {
        if (sp_root[static_cast<std::size_t>(uf.find(v))]) {
            if (site >= 0) return -2;
            site = v;
        }
    }
    return site;
}

GluingInstance micro_instance() {
    GluingInstance inst;
    inst.k = 1;
    inst.window = PlanarBox{0, 3, 0, 1};
    inst.source = rect_region(0, 0, 0, 1);
    inst.Z = rect_region(3, 3, 0, 1);
    inst.Yminus = rect_region(3, 3, 0, 0);
    inst.Yplus = rect_region(3, 3, 1, 1);
    inst.Bprime = rect_region(1, 3, 0, 1);
    inst.Sprime = rect_region(1, 1, 0, 0);
    inst.ambient = rect_region(0, 3, 0, 1);
    inst.target_ambient = inst.ambient;
    inst.R = 1;
    inst.p = {1, 2};
    return inst;
}

GluingInstance micro_instance_tiny() {
    GluingInstance inst;
    inst.k = 1;
    inst.window = PlanarBox{0, 2, 0, 1};
    inst.source = rect_region(0, 0, 0, 1);
    inst.Z = rect_region(2, 2, 0, 1);
    inst.Yminus = rect_region(2, 2, 0, 0);
    inst.Yplus = rect_region(2, 2, 1, 1);
    inst.Bprime = rect_region(1, 2, 0, 1);
    inst.Sprime = rect_region(1, 1, 0, 0);
    inst.ambient = rect_region(0, 2, 0, 1);
    inst.target_ambient = inst.ambient;
    inst.R = 1;
    inst.p = {1, 2};
    return inst;
}

Lemma5Report audit_lemma5(const SlabGeometry& g, RationalP p,
                          const std::function<bool(const Configuration&)>& event_A,
                          const std::function<bool(const Configuration&)>& event_B,
                          const std::function<std::vector<Configuration>(const Configuration&)>& map,
                          long s, long t, int cap) {
    const int E = g.edge_count();
    if (E > cap || E > 62) throw std::invalid_argument("audit_lemma5: edge count above cap");
    Lemma5Report rep;
    rep.s_given = s;
    rep.t_given = t;
    rep.t_tight = -1;
    rep.denominator = boost::multiprecision::pow(BigInt(p.den), static_cast<unsigned>(E));

    std::vector<BigInt> open_pow(static_cast<std::size_t>(E) + 1), closed_pow(static_cast<std::size_t>(E) + 1);
    open_pow[0] = closed_pow[0] = 1;
    for (int j = 1; j <= E; ++j) {
        open_pow[static_cast<std::size_t>(j)] = open_pow[static_cast<std::size_t>(j - 1)] * p.num;
        closed_pow[static_cast<std::size_t>(j)] = closed_pow[static_cast<std::size_t>(j - 1)] * (p.den - p.num);
    }
    auto weight_of = [&](std::uint64_t mask) {
        const int open = std::popcount(mask);
        return open_pow[static_cast<std::size_t>(open)] * closed_pow[static_cast<std::size_t>(E - open)];
    };
    auto mask_of = [&](const Configuration& c) {
        return c.words()[0] & ((E == 64 ? ~0ULL : (1ULL << E) - 1));
    };

    std::vector<std::pair<std::uint64_t, std::uint64_t>> records;  // (image, diff)
    const std::uint64_t total = 1ULL << E;
    for (std::uint64_t m = 0; m < total; ++m) {
        Configuration c(E);
        for (int e = 0; e < E; ++e)
            if ((m >> e) & 1) c.set(e, true);
        const bool in_A = event_A(c);
        const bool in_B = event_B(c);
        if (in_A) {
            rep.weight_A += weight_of(m);
            ++rep.count_A;
        }
        if (in_B) {
            rep.weight_B += weight_of(m);
            ++rep.count_B;
        }
        if (!in_A) continue;
        std::vector<Configuration> images = map(c);
        std::set<std::uint64_t> distinct;
        for (const Configuration& im : images) {
            const std::uint64_t im_mask = mask_of(im);
            distinct.insert(im_mask);
            if (!event_B(im)) {
                rep.hyp_images_in_B = false;
                if (rep.witnesses.size() < 5) rep.witnesses.push_back(dump_portable(g, c));
            }
            records.push_back({im_mask, im_mask ^ m});
        }
        const long mult = static_cast<long>(distinct.size());
        if (mult < t) {
            rep.hyp_multiplicity = false;
            if (rep.witnesses.size() < 5) rep.witnesses.push_back(dump_portable(g, c));
        }
        if (rep.t_tight < 0 || mult < rep.t_tight) rep.t_tight = mult;
    }
    if (rep.t_tight < 0) rep.t_tight = 0;

    std::sort(records.begin(), records.end());
    for (std::size_t i = 0; i < records.size();) {
        std::uint64_t support = 0;
        std::size_t j = i;
        while (j < records.size() && records[j].first == records[i].first) {
            support |= records[j].second;
            ++j;
        }
        rep.s_tight = std::max(rep.s_tight, static_cast<long>(std::popcount(support)));
        i = j;
    }
    if (rep.s_tight > rep.s_given) rep.hyp_locality = false;

    // P[A] <= (2/min(p,1-p))^s / t * P[B], exactly:
    // weight_A * m^s * t <= (2 den)^s * weight_B with m = min(num, den-num).
    const long mm = std::min(p.num, p.den - p.num);
    auto conclusion = [&](long ss, long tt) {
        if (tt <= 0) return false;
        const BigInt lhs = rep.weight_A * boost::multiprecision::pow(BigInt(mm), static_cast<unsigned>(ss)) * tt;
        const BigInt rhs = boost::multiprecision::pow(BigInt(2 * p.den), static_cast<unsigned>(ss)) * rep.weight_B;
        return lhs <= rhs;
    };
    rep.conclusion_holds = conclusion(rep.s_given, rep.t_given);
    rep.conclusion_tight_holds = conclusion(rep.s_tight, std::max(1L, rep.t_tight));
    return rep;
}

namespace {

// Compact event scanner for the exhaustive micro audit: evaluates the A
// event, the two arms, and the glued target event straight off an edge mask.
struct MicroScanner {
    int n_vertices = 0;
    int n_edges = 0;
    std::vector<std::pair<int, int>> full_edges;   // all edges, vertex ids
    std::vector<int> arm_edge_ids;                 // edges of the lifted B'
    std::vector<std::pair<int, int>> arm_edges;
    std::vector<int> source, Z, Sprime, Yplus, Yminus;

    mutable std::array<int, 64> parent{};

    int find(int x) const {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) const {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(b)] = a;
    }

    struct Events {
        bool a_event;
        bool arm_minus;
        bool arm_plus;
        bool target;
    };

    Events eval(std::uint64_t mask) const {
        Events ev{};
        for (int v = 0; v < n_vertices; ++v) parent[static_cast<std::size_t>(v)] = v;
        for (int e = 0; e < n_edges; ++e)
            if ((mask >> e) & 1) unite(full_edges[static_cast<std::size_t>(e)].first,
                                       full_edges[static_cast<std::size_t>(e)].second);
        ev.a_event = meets(source, Z);
        ev.target = meets(source, Sprime);
        for (int v = 0; v < n_vertices; ++v) parent[static_cast<std::size_t>(v)] = v;
        for (std::size_t i = 0; i < arm_edge_ids.size(); ++i)
            if ((mask >> arm_edge_ids[i]) & 1)
                unite(arm_edges[i].first, arm_edges[i].second);
        ev.arm_minus = meets(Sprime, Yminus);
        ev.arm_plus = meets(Sprime, Yplus);
        return ev;
    }

    bool meets(const std::vector<int>& xs, const std::vector<int>& ys) const {
        for (int x : xs)
            for (int y : ys)
                if (find(x) == find(y)) return true;
        return false;
    }
};

MicroScanner build_scanner(const SlabGeometry& g, const GluingInstance& inst) {
    MicroScanner sc;
    sc.n_vertices = g.vertex_count();
    sc.n_edges = g.edge_count();
    for (int e = 0; e < g.edge_count(); ++e)
        sc.full_edges.push_back({g.edge(e).a, g.edge(e).b});
    for (int e : g.lifted_edges(inst.Bprime)) {
        sc.arm_edge_ids.push_back(e);
        sc.arm_edges.push_back({g.edge(e).a, g.edge(e).b});
    }
    sc.source = g.lift(inst.source);
    sc.Z = g.lift(inst.Z);
    sc.Sprime = g.lift(inst.Sprime);
    sc.Yplus = g.lift(inst.Yplus);
    sc.Yminus = g.lift(inst.Yminus);
    return sc;
}

std::uint64_t config_mask(const Configuration& c) { return c.words()[0]; }

}  // namespace

MicroAuditReport run_micro_audit(const GluingInstance& inst, bool check_minpath_all,
                                 bool check_minpath_on_X) {
    SlabGeometry g(inst.k, inst.window);
    const int E = g.edge_count();
    if (E > 30) throw std::invalid_argument("run_micro_audit: instance too large to enumerate");
    const MicroScanner scanner = build_scanner(g, inst);

    MicroAuditReport rep;
    rep.instance = inst;
    rep.configs = 1LL << E;
    rep.minpath_checked = check_minpath_all || check_minpath_on_X;
    rep.min_U = -1;
    rep.t_fact2 = -1;

    const RationalP p = inst.p;
    std::vector<BigInt> open_pow(static_cast<std::size_t>(E) + 1), closed_pow(static_cast<std::size_t>(E) + 1);
    open_pow[0] = closed_pow[0] = 1;
    for (int j = 1; j <= E; ++j) {
        open_pow[static_cast<std::size_t>(j)] = open_pow[static_cast<std::size_t>(j - 1)] * p.num;
        closed_pow[static_cast<std::size_t>(j)] = closed_pow[static_cast<std::size_t>(j - 1)] * (p.den - p.num);
    }
    rep.denominator = boost::multiprecision::pow(BigInt(p.den), static_cast<unsigned>(E));

    // Static bound for the Fact 2 support: edges of the lifted B_{R+1}(z)
    // box, maximized over window cells.
    {
        long best = 0;
        for (int x = inst.window.xmin; x <= inst.window.xmax; ++x)
            for (int y = inst.window.ymin; y <= inst.window.ymax; ++y) {
                const Region b1 = clipped_box(g, {x, y}, inst.R + 1);
                best = std::max(best, static_cast<long>(g.lifted_edges(b1).size()));
            }
        rep.s_fact2 = best;
    }

    const std::uint64_t total = 1ULL << E;

    // The scan partitions the configuration space across workers; every
    // partial merges associatively (sums, minima, maxima), so the report is
    // identical for any worker count. Witnesses are re-sorted by mask.
    struct Partial {
        long long count_A = 0, count_arms = 0, count_X = 0, count_target = 0,
                  count_no_two_arms = 0;
        BigInt weight_X, weight_no_two_arms, weight_target;
        long min_U = -1, max_U = 0, t_fact2 = -1;
        long s_fact1 = 0, s_fact1_tight = 0, s_fact2_tight = 0;
        long long v_minpath = 0, v_fact1 = 0, v_phi_inv = 0, v_fact1_loc = 0, v_psi_con = 0,
                  v_psi_tgt = 0, v_psi_inj = 0, v_psi_loc = 0, v_psi_stab = 0, v_psi_mark = 0;
        std::vector<std::pair<std::uint64_t, std::string>> witnesses;
    };

    auto scan_mask = [&](std::uint64_t m, const MicroScanner& sc, Partial& acc) {
        const auto ev = sc.eval(m);
        const int open = std::popcount(m);
        const BigInt w = open_pow[static_cast<std::size_t>(open)] *
                         closed_pow[static_cast<std::size_t>(E - open)];
        const bool arms = ev.arm_minus && ev.arm_plus;
        const bool in_X = ev.a_event && arms && !ev.target;
        if (ev.a_event) ++acc.count_A;
        if (arms) ++acc.count_arms;
        if (!arms) {
            ++acc.count_no_two_arms;
            acc.weight_no_two_arms += w;
        }
        if (ev.target) {
            ++acc.count_target;
            acc.weight_target += w;
        }
        if (in_X) {
            ++acc.count_X;
            acc.weight_X += w;
        }

        const bool need_paths = in_X || check_minpath_all;
        if (!need_paths) return;
        Configuration cfg(E);
        for (int e = 0; e < E; ++e)
            if ((m >> e) & 1) cfg.set(e, true);
        auto add_witness = [&](const std::string& tag) {
            if (acc.witnesses.size() < 32) acc.witnesses.push_back({m, tag + " " + dump_portable(g, cfg)});
        };

        const auto gamma = min_path(g, cfg, inst.source, inst.Z, inst.ambient);
        if (check_minpath_all || (in_X && check_minpath_on_X)) {
            const auto brute = min_path_bruteforce(g, cfg, inst.source, inst.Z, inst.ambient);
            const bool same = (!gamma && !brute) ||
                              (gamma && brute && gamma->vertices == brute->vertices);
            if (!same) {
                ++acc.v_minpath;
                add_witness("minpath");
            }
        }
        if (!in_X) return;

        const std::vector<PlanarPoint> U = compute_U(g, cfg, *gamma, inst.Bprime, inst.Sprime);
        const long usz = static_cast<long>(U.size());
        if (acc.min_U < 0 || usz < acc.min_U) acc.min_U = usz;
        acc.max_U = std::max(acc.max_U, usz);
        if (acc.t_fact2 < 0 || usz < acc.t_fact2) acc.t_fact2 = usz;

        // Fact 1: the closing surgery kills the two-arm event and preserves
        // gamma_min and U; it only touches edges adjacent to the U columns.
        const std::vector<int> adj = edges_adjacent_to_columns(g, U);
        acc.s_fact1 = std::max(acc.s_fact1, static_cast<long>(adj.size()));
        const Configuration phi = surgery_phi(g, cfg, U, inst.Sprime);
        {
            const auto pev = sc.eval(config_mask(phi));
            if (pev.arm_minus && pev.arm_plus) {
                ++acc.v_fact1;
                add_witness("fact1-arms");
            }
            const auto gamma_phi = min_path(g, phi, inst.source, inst.Z, inst.ambient);
            const bool gamma_same = gamma_phi && gamma_phi->vertices == gamma->vertices;
            const bool u_same = gamma_same && compute_U(g, phi, *gamma_phi, inst.Bprime,
                                                        inst.Sprime) == U;
            if (!gamma_same || !u_same) {
                ++acc.v_phi_inv;
                add_witness("phi-invariance");
            }
            std::uint64_t diff = config_mask(phi) ^ m;
            std::uint64_t adj_mask = 0;
            for (int e : adj) adj_mask |= 1ULL << e;
            if (diff & ~adj_mask) {
                ++acc.v_fact1_loc;
                add_witness("fact1-locality");
            }
            acc.s_fact1_tight = std::max(acc.s_fact1_tight, static_cast<long>(std::popcount(diff)));
        }

        // Fact 2: one rewiring per candidate site.
        std::set<std::uint64_t> images;
        for (PlanarPoint z : U) {
            const PsiResult psi = surgery_psi(g, cfg, z, inst.R, inst, *gamma);
            if (!psi.ok) {
                ++acc.v_psi_con;
                add_witness("psi-construct(" + psi.error + ")");
                continue;
            }
            const std::uint64_t im = config_mask(psi.result);
            images.insert(im);
            const auto iev = sc.eval(im);
            if (!iev.target) {
                ++acc.v_psi_tgt;
                add_witness("psi-target");
            }
            // Locality: the image differs from the source only inside the
            // lifted B_{R+1}(z) box.
            std::uint64_t box_mask = 0;
            for (int e : g.lifted_edges(clipped_box(g, z, inst.R + 1)))
                box_mask |= 1ULL << e;
            const std::uint64_t diff = im ^ m;
            if (diff & ~box_mask) {
                ++acc.v_psi_loc;
                add_witness("psi-locality");
            }
            acc.s_fact2_tight = std::max(acc.s_fact2_tight, static_cast<long>(std::popcount(diff)));
            // Minimal-path stability: old prefix, gamma_u, the site, gamma_v,
            // old suffix.
            {
                std::vector<int> expect;
                for (int i = 0;; ++i) {
                    expect.push_back(gamma->vertices[static_cast<std::size_t>(i)]);
                    if (gamma->vertices[static_cast<std::size_t>(i)] == psi.record.u_prime) break;
                }
                for (auto it = psi.record.path_u.rbegin() + 1; it != psi.record.path_u.rend(); ++it)
                    expect.push_back(*it);
                expect.push_back(psi.record.z_site);
                expect.insert(expect.end(), psi.record.path_v.begin(), psi.record.path_v.end());
                bool seen_vprime = false;
                for (int v : gamma->vertices) {
                    if (seen_vprime) expect.push_back(v);
                    if (v == psi.record.v_prime) seen_vprime = true;
                }
                const auto new_gamma = min_path(g, psi.result, inst.source, inst.Z, inst.ambient);
                if (!new_gamma || new_gamma->vertices != expect) {
                    ++acc.v_psi_stab;
                    add_witness("psi-stability");
                }
            }
            // The marked site is recoverable from the image alone.
            {
                const int site = recover_marked_site(g, psi.result, inst);
                const SlabVertex sv = site >= 0 ? g.vertex(site) : SlabVertex{-9, -9, -9};
                if (site < 0 || sv.x != z.x || sv.y != z.y) {
                    ++acc.v_psi_mark;
                    add_witness("psi-marked-site");
                }
            }
        }
        if (static_cast<long>(images.size()) != usz) {
            ++acc.v_psi_inj;
            add_witness("psi-injective");
        }
    };

    std::vector<std::pair<std::uint64_t, std::string>> all_witnesses;
    auto merge = [&](const Partial& acc) {
        rep.count_A += acc.count_A;
        rep.count_arms += acc.count_arms;
        rep.count_X += acc.count_X;
        rep.count_target += acc.count_target;
        rep.count_no_two_arms += acc.count_no_two_arms;
        rep.weight_X += acc.weight_X;
        rep.weight_no_two_arms += acc.weight_no_two_arms;
        rep.weight_target += acc.weight_target;
        if (acc.min_U >= 0 && (rep.min_U < 0 || acc.min_U < rep.min_U)) rep.min_U = acc.min_U;
        rep.max_U = std::max(rep.max_U, acc.max_U);
        if (acc.t_fact2 >= 0 && (rep.t_fact2 < 0 || acc.t_fact2 < rep.t_fact2))
            rep.t_fact2 = acc.t_fact2;
        rep.s_fact1 = std::max(rep.s_fact1, acc.s_fact1);
        rep.s_fact1_tight = std::max(rep.s_fact1_tight, acc.s_fact1_tight);
        rep.s_fact2_tight = std::max(rep.s_fact2_tight, acc.s_fact2_tight);
        rep.violations_minpath += acc.v_minpath;
        rep.violations_fact1 += acc.v_fact1;
        rep.violations_phi_invariance += acc.v_phi_inv;
        rep.violations_fact1_locality += acc.v_fact1_loc;
        rep.violations_psi_construct += acc.v_psi_con;
        rep.violations_psi_target += acc.v_psi_tgt;
        rep.violations_psi_injective += acc.v_psi_inj;
        rep.violations_psi_locality += acc.v_psi_loc;
        rep.violations_psi_stability += acc.v_psi_stab;
        rep.violations_psi_marked_site += acc.v_psi_mark;
        all_witnesses.insert(all_witnesses.end(), acc.witnesses.begin(), acc.witnesses.end());
    };

#ifdef _OPENMP
#pragma omp parallel
    {
        Partial acc;
        const MicroScanner local_scanner = scanner;
#pragma omp for schedule(dynamic, 1 << 16)
        for (std::int64_t m = 0; m < static_cast<std::int64_t>(total); ++m)
            scan_mask(static_cast<std::uint64_t>(m), local_scanner, acc);
#pragma omp critical
        merge(acc);
    }
#else
    {
        Partial acc;
        for (std::uint64_t m = 0; m < total; ++m) scan_mask(m, scanner, acc);
        merge(acc);
    }
#endif
    std::sort(all_witnesses.begin(), all_witnesses.end());
    for (const auto& [mask, text] : all_witnesses) {
        if (rep.witnesses.size() >= 8) break;
        rep.witnesses.push_back(text);
    }

    if (rep.min_U < 0) rep.min_U = 0;
    if (rep.t_fact2 < 0) rep.t_fact2 = 0;

    // Exact multi-valued-map inequalities at the audited (s, t):
    //   P[X] <= (2/min(p,1-p))^s1 * P[no two arms]          (Fact 1, t = 1)
    //   P[X] <= (2/min(p,1-p))^s2 / t * P[glued connection]  (Fact 2)
    const long mm = std::min(p.num, p.den - p.num);
    auto holds = [&](const BigInt& wa, long s, long t, const BigInt& wb) {
        if (t <= 0) return false;
        const BigInt lhs = wa * boost::multiprecision::pow(BigInt(mm), static_cast<unsigned>(s)) * t;
        const BigInt rhs = boost::multiprecision::pow(BigInt(2 * p.den), static_cast<unsigned>(s)) * wb;
        return lhs <= rhs;
    };
    rep.fact1_inequality = holds(rep.weight_X, rep.s_fact1, 1, rep.weight_no_two_arms);
    rep.fact2_inequality =
        rep.count_X == 0 || holds(rep.weight_X, rep.s_fact2, rep.t_fact2, rep.weight_target);
    return rep;
}

}  // namespace slabperc
