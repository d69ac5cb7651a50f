#include "slabperc/cluster.hpp"

#include <algorithm>
#include <stdexcept>

namespace slabperc {

void UnionFind::reset(int n) {
    parent_.resize(static_cast<std::size_t>(n));
    size_.assign(static_cast<std::size_t>(n), 1);
    for (int i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
}

RegionGraph::RegionGraph(const SlabGeometry& g, const Region& region) {
    verts_ = g.lift(region);
    n_vertices_ = static_cast<int>(verts_.size());
    compact_.assign(static_cast<std::size_t>(g.vertex_count()), -1);
    for (int i = 0; i < n_vertices_; ++i)
        compact_[static_cast<std::size_t>(verts_[static_cast<std::size_t>(i)])] = i;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        const int ca = compact_[static_cast<std::size_t>(ed.a)];
        const int cb = compact_[static_cast<std::size_t>(ed.b)];
        if (ca >= 0 && cb >= 0) {
            edge_ids_.push_back(e);
            endpoints_.push_back({ca, cb});
        }
    }
}

std::vector<int> RegionGraph::compact_lift(const SlabGeometry& g, const Region& sub) const {
    std::vector<int> out;
    for (int v : g.lift(sub)) {
        const int c = compact_[static_cast<std::size_t>(v)];
        if (c >= 0) out.push_back(c);
    }
    return out;
}

ClusterLabeling clusters(const SlabGeometry& g, const Configuration& c, const Region& region) {
    RegionGraph rg(g, region);
    UnionFind uf;
    rg.unite_open(c, uf);
    ClusterLabeling out;
    out.vertex_ids.resize(static_cast<std::size_t>(rg.vertex_count()));
    for (int i = 0; i < rg.vertex_count(); ++i)
        out.vertex_ids[static_cast<std::size_t>(i)] = rg.geometry_vertex(i);
    // Canonical label: smallest member vertex. Compact ids follow vertex
    // order, so the root's minimum compact member gives it directly.
    std::vector<int> min_member(static_cast<std::size_t>(rg.vertex_count()), -1);
    for (int i = 0; i < rg.vertex_count(); ++i) {
        const int r = uf.find(i);
        if (min_member[static_cast<std::size_t>(r)] < 0) min_member[static_cast<std::size_t>(r)] = i;
    }
    out.cluster_ids.resize(static_cast<std::size_t>(rg.vertex_count()));
    int count = 0;
    for (int i = 0; i < rg.vertex_count(); ++i) {
        const int r = uf.find(i);
        out.cluster_ids[static_cast<std::size_t>(i)] =
            rg.geometry_vertex(min_member[static_cast<std::size_t>(r)]);
        if (min_member[static_cast<std::size_t>(r)] == i) ++count;
    }
    out.cluster_count = count;
    return out;
}

namespace {

void check_subregions(const Region& X, const Region& Y, const Region& B) {
    if (!B.contains_region(X) || !B.contains_region(Y))
        throw std::invalid_argument("connectivity: X and Y must be subsets of B");
}

}  // namespace

bool connected_compiled(const RegionGraph& rg, const Configuration& c, const std::vector<int>& src,
                        const std::vector<int>& dst, UnionFind& uf, std::vector<int>& mark) {
    rg.unite_open(c, uf);
    mark.assign(static_cast<std::size_t>(rg.vertex_count()), 0);
    for (int s : src) mark[static_cast<std::size_t>(uf.find(s))] = 1;
    for (int d : dst)
        if (mark[static_cast<std::size_t>(uf.find(d))]) return true;
    return false;
}

bool unique_cluster_compiled(const RegionGraph& rg, const Configuration& c,
                             const std::vector<int>& src, const std::vector<int>& dst,
                             UnionFind& uf, std::vector<int>& mark) {
    rg.unite_open(c, uf);
    mark.assign(static_cast<std::size_t>(rg.vertex_count()), 0);
    for (int s : src) mark[static_cast<std::size_t>(uf.find(s))] = 1;
    int meeting = 0;
    for (int d : dst) {
        const int r = uf.find(d);
        if (mark[static_cast<std::size_t>(r)] == 1) {
            mark[static_cast<std::size_t>(r)] = 2;  // count each cluster once
            if (++meeting > 1) return false;
        }
    }
    return meeting == 1;
}

bool connected(const SlabGeometry& g, const Configuration& c, const Region& X, const Region& Y,
               const Region& B) {
    check_subregions(X, Y, B);
    RegionGraph rg(g, B);
    UnionFind uf;
    std::vector<int> mark;
    return connected_compiled(rg, c, rg.compact_lift(g, X), rg.compact_lift(g, Y), uf, mark);
}

bool unique_cluster(const SlabGeometry& g, const Configuration& c, const Region& X, const Region& Y,
                    const Region& B) {
    check_subregions(X, Y, B);
    RegionGraph rg(g, B);
    UnionFind uf;
    std::vector<int> mark;
    return unique_cluster_compiled(rg, c, rg.compact_lift(g, X), rg.compact_lift(g, Y), uf, mark);
}

}  // namespace slabperc
