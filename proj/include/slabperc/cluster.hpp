#pragma once

#include <vector>

#include "slabperc/config.hpp"
#include "slabperc/geometry.hpp"

namespace slabperc {

/// Union-find with path halving and union by size. Reused across Monte Carlo
/// iterations as per-worker scratch; reset() is O(n).
class UnionFind {
public:
    void reset(int n);
    int find(int x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            parent_[static_cast<std::size_t>(x)] =
                parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
            x = parent_[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
        return true;
    }
    int size() const { return static_cast<int>(parent_.size()); }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
};

/// Precompiled view of the edges of a lifted region: the inner structure the
/// Monte Carlo kernels run union-find over. Vertices are compacted to
/// 0..n_vertices-1 in vertex order.
class RegionGraph {
public:
    RegionGraph() = default;
    RegionGraph(const SlabGeometry& g, const Region& region);

    int vertex_count() const { return n_vertices_; }
    const std::vector<int>& edge_ids() const { return edge_ids_; }
    /// Compact endpoints, parallel to edge_ids().
    const std::vector<std::pair<int, int>>& endpoints() const { return endpoints_; }
    /// Compact id of a geometry vertex, or -1 when outside the lifted region.
    int compact_id(int geometry_vertex) const {
        return compact_[static_cast<std::size_t>(geometry_vertex)];
    }
    /// Geometry vertex of a compact id.
    int geometry_vertex(int compact) const { return verts_[static_cast<std::size_t>(compact)]; }
    /// Compact ids of a sub-region's lifted vertices (those inside this region).
    std::vector<int> compact_lift(const SlabGeometry& g, const Region& sub) const;

    /// Runs union-find over the open edges; scratch must be reset by callee.
    void unite_open(const Configuration& c, UnionFind& uf) const {
        uf.reset(n_vertices_);
        for (std::size_t i = 0; i < edge_ids_.size(); ++i) {
            if (c.open(edge_ids_[i])) uf.unite(endpoints_[i].first, endpoints_[i].second);
        }
    }

private:
    int n_vertices_ = 0;
    std::vector<int> edge_ids_;
    std::vector<std::pair<int, int>> endpoints_;
    std::vector<int> compact_;
    std::vector<int> verts_;
};

/// Cluster labeling of a lifted region: one id per lifted vertex, equal iff
/// the two vertices are joined by open edges inside the region. Labels are
/// canonical: the smallest member vertex in vertex order.
struct ClusterLabeling {
    std::vector<int> vertex_ids;   // geometry vertex ids of the lifted region, sorted
    std::vector<int> cluster_ids;  // parallel; canonical labels
    int cluster_count = 0;
};

ClusterLabeling clusters(const SlabGeometry& g, const Configuration& c, const Region& region);

/// True iff an open cluster in the lifted region meets both lifted X and Y.
bool connected(const SlabGeometry& g, const Configuration& c, const Region& X, const Region& Y,
               const Region& B);

/// True iff exactly one open cluster in the lifted region meets both.
bool unique_cluster(const SlabGeometry& g, const Configuration& c, const Region& X, const Region& Y,
                    const Region& B);

/// Kernel variants on a precompiled RegionGraph (used by the estimators).
bool connected_compiled(const RegionGraph& rg, const Configuration& c, const std::vector<int>& src,
                        const std::vector<int>& dst, UnionFind& uf, std::vector<int>& mark_scratch);
bool unique_cluster_compiled(const RegionGraph& rg, const Configuration& c,
                             const std::vector<int>& src, const std::vector<int>& dst,
                             UnionFind& uf, std::vector<int>& mark_scratch);

}  // namespace slabperc
