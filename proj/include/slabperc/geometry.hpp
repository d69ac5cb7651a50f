#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace slabperc {

struct PlanarPoint {
    int x = 0;
    int y = 0;
    friend bool operator==(PlanarPoint a, PlanarPoint b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(PlanarPoint a, PlanarPoint b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }
};

struct PlanarBox {
    int xmin = 0, xmax = -1, ymin = 0, ymax = -1;
    bool empty() const { return xmax < xmin || ymax < ymin; }
    int width() const { return xmax - xmin + 1; }
    int height() const { return ymax - ymin + 1; }
    bool contains(PlanarPoint p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
};

/// Finite subset of Z^2. Cells are kept sorted and unique, so equality is
/// set equality. The lift to the slab (cells x {0..k}) is done by
/// SlabGeometry::lift.
class Region {
public:
    Region() = default;
    explicit Region(std::vector<PlanarPoint> cells);

    const std::vector<PlanarPoint>& cells() const { return cells_; }
    bool contains(PlanarPoint p) const;
    bool contains_region(const Region& other) const;
    bool empty() const { return cells_.empty(); }
    std::size_t size() const { return cells_.size(); }

    Region translated(int dx, int dy) const;
    Region united(const Region& other) const;
    Region minus(const Region& other) const;
    PlanarBox bounding_box() const;

    friend bool operator==(const Region& a, const Region& b) { return a.cells_ == b.cells_; }

private:
    std::vector<PlanarPoint> cells_;
};

Region box_region(int n);                       // [-n,n]^2
Region boundary_region(int n);                  // B_n \ B_{n-1}
Region segment_region(int x, int a, int b);     // {x} x [a,b]
Region rect_region(int x0, int x1, int y0, int y1);
Region translate(const Region& r, int dx, int dy);

/// The five-subset family of the joint three-arm construction at scale n:
/// the concentric boxes with their central boxes, the primed copies shifted
/// to (2n, y), and the three segments on the line x = 3n. The two Y segments
/// each overlap the Z segment in exactly one point.
struct BoxFamily {
    int n = 1;      // scale
    int u = 0;      // S_n = B_u
    int u3 = 0;     // S_3n = B_u3
    int alpha = 1;  // segment split height
    int y = 0;      // vertical center of the primed boxes

    Region box() const { return box_region(n); }
    Region boundary() const { return boundary_region(n); }
    Region center() const { return box_region(u); }
    Region big_box() const { return box_region(3 * n); }
    Region big_center() const { return box_region(u3); }
    Region primed_box() const { return translate(box_region(n), 2 * n, y); }
    Region primed_center() const { return translate(box_region(u), 2 * n, y); }
    Region y_plus() const { return segment_region(3 * n, y + alpha, y + n); }
    Region y_minus() const { return segment_region(3 * n, y - n, y - alpha); }
    Region z_segment() const { return segment_region(3 * n, y - alpha, y + alpha); }
};

struct SlabVertex {
    int x = 0;
    int y = 0;
    int layer = 0;
    friend bool operator==(SlabVertex a, SlabVertex b) {
        return a.x == b.x && a.y == b.y && a.layer == b.layer;
    }
    /// The vertex order used by the path order (lexicographic on (x, y, layer)).
    friend bool operator<(SlabVertex a, SlabVertex b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.layer < b.layer;
    }
};

/// Directions of edges emanating from a vertex, in their fixed rank order.
/// The order is invariant under translations of Z^2.
enum class EdgeDir : int { XPos = 0, XNeg = 1, YPos = 2, YNeg = 3, LayerPos = 4, LayerNeg = 5 };

/// The eight symmetries of the box [-n,n]^2 (dihedral group acting on the
/// first two coordinates, fixing the layer). Index encodes (swap, negx, negy).
struct BoxSymmetry {
    int index = 0;  // 0..7
    PlanarPoint apply(PlanarPoint p) const;
    SlabVertex apply(SlabVertex v) const;
    BoxSymmetry inverse() const;
};

std::array<BoxSymmetry, 8> box_symmetries();

/// Applies a box symmetry to a vertex of the lifted box B_n x {0..k}.
/// Throws if the vertex lies outside that box.
SlabVertex apply_symmetry(BoxSymmetry s, SlabVertex v, int n);
Region apply_symmetry(BoxSymmetry s, const Region& r);

/// The slab Z^2 x {0..k} restricted to a finite planar window. Vertices and
/// edges carry stable indices for a fixed (k, window): vertex ids increase in
/// (x, y, layer) lexicographic order, matching the vertex order above.
class SlabGeometry {
public:
    SlabGeometry(int k, PlanarBox window);

    int k() const { return k_; }
    const PlanarBox& window() const { return window_; }
    int layers() const { return k_ + 1; }

    int vertex_count() const { return n_vertices_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    bool contains(SlabVertex v) const {
        return window_.contains({v.x, v.y}) && v.layer >= 0 && v.layer <= k_;
    }
    int vertex_id(SlabVertex v) const;
    SlabVertex vertex(int id) const;

    struct Edge {
        int a = -1;           // endpoint ids, a < b
        int b = -1;
        EdgeDir dir_from_a = EdgeDir::XPos;  // direction a -> b (always a positive direction)
    };
    const Edge& edge(int e) const { return edges_[e]; }
    /// Edge id between two adjacent vertices, or -1.
    int edge_between(int va, int vb) const;
    /// Neighbor vertex id of v in the given direction, or -1.
    int neighbor(int v, EdgeDir dir) const { return neighbor_[static_cast<std::size_t>(v) * 6 + static_cast<int>(dir)]; }
    /// Edge id incident to v in the given direction, or -1.
    int incident_edge(int v, EdgeDir dir) const { return incident_[static_cast<std::size_t>(v) * 6 + static_cast<int>(dir)]; }

    /// Stable 64-bit identity of an edge, independent of the window. Used as
    /// the counter for seeding so that configurations couple across windows
    /// and slab widths.
    std::uint64_t edge_identity(int e) const;

    /// Vertex ids of the lifted region (cells x {0..k}), restricted to the
    /// window, in vertex order.
    std::vector<int> lift(const Region& r) const;
    /// Edge ids with both endpoints in the lifted region.
    std::vector<int> lifted_edges(const Region& r) const;

    std::string describe_json() const;  // {"k":..,"window":[xmin,xmax,ymin,ymax]}

private:
    int k_;
    PlanarBox window_;
    int n_vertices_;
    std::vector<Edge> edges_;
    std::vector<int> neighbor_;   // n_vertices x 6
    std::vector<int> incident_;   // n_vertices x 6
};

std::string region_json(const Region& r);

}  // namespace slabperc
