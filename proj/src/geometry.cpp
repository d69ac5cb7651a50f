#include "slabperc/geometry.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace slabperc {

Region::Region(std::vector<PlanarPoint> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

bool Region::contains(PlanarPoint p) const {
    return std::binary_search(cells_.begin(), cells_.end(), p);
}

bool Region::contains_region(const Region& other) const {
    return std::all_of(other.cells_.begin(), other.cells_.end(),
                       [&](PlanarPoint p) { return contains(p); });
}

Region Region::translated(int dx, int dy) const {
    std::vector<PlanarPoint> out;
    out.reserve(cells_.size());
    for (PlanarPoint p : cells_) out.push_back({p.x + dx, p.y + dy});
    return Region(std::move(out));
}

Region Region::united(const Region& other) const {
    std::vector<PlanarPoint> out;
    out.reserve(cells_.size() + other.cells_.size());
    std::merge(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
               std::back_inserter(out));
    return Region(std::move(out));
}

Region Region::minus(const Region& other) const {
    std::vector<PlanarPoint> out;
    std::set_difference(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                        std::back_inserter(out));
    return Region(std::move(out));
}

PlanarBox Region::bounding_box() const {
    PlanarBox b;
    if (cells_.empty()) return b;
    b.xmin = b.xmax = cells_[0].x;
    b.ymin = b.ymax = cells_[0].y;
    for (PlanarPoint p : cells_) {
        b.xmin = std::min(b.xmin, p.x);
        b.xmax = std::max(b.xmax, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.ymax = std::max(b.ymax, p.y);
    }
    return b;
}

Region rect_region(int x0, int x1, int y0, int y1) {
    std::vector<PlanarPoint> cells;
    for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y) cells.push_back({x, y});
    return Region(std::move(cells));
}

Region box_region(int n) {
    if (n < 0) throw std::invalid_argument("box_region: n must be >= 0");
    return rect_region(-n, n, -n, n);
}

Region boundary_region(int n) {
    if (n == 0) return box_region(0);
    return box_region(n).minus(box_region(n - 1));
}

Region segment_region(int x, int a, int b) {
    if (a > b) throw std::invalid_argument("segment_region: a must be <= b");
    std::vector<PlanarPoint> cells;
    for (int y = a; y <= b; ++y) cells.push_back({x, y});
    return Region(std::move(cells));
}

Region translate(const Region& r, int dx, int dy) { return r.translated(dx, dy); }

PlanarPoint BoxSymmetry::apply(PlanarPoint p) const {
    if (index & 4) std::swap(p.x, p.y);
    if (index & 1) p.x = -p.x;
    if (index & 2) p.y = -p.y;
    return p;
}

SlabVertex BoxSymmetry::apply(SlabVertex v) const {
    PlanarPoint p = apply(PlanarPoint{v.x, v.y});
    return {p.x, p.y, v.layer};
}

BoxSymmetry BoxSymmetry::inverse() const {
    // swap happens first in apply, so the inverse swaps the sign bits.
    if (!(index & 4)) return *this;
    int nx = (index >> 1) & 1, ny = index & 1;
    return BoxSymmetry{4 | (ny << 1) | nx};
}

std::array<BoxSymmetry, 8> box_symmetries() {
    std::array<BoxSymmetry, 8> out;
    for (int i = 0; i < 8; ++i) out[i] = BoxSymmetry{i};
    return out;
}

SlabVertex apply_symmetry(BoxSymmetry s, SlabVertex v, int n) {
    if (std::abs(v.x) > n || std::abs(v.y) > n)
        throw std::invalid_argument("apply_symmetry: vertex outside the symmetrized box");
    return s.apply(v);
}

Region apply_symmetry(BoxSymmetry s, const Region& r) {
    std::vector<PlanarPoint> cells;
    cells.reserve(r.size());
    for (PlanarPoint p : r.cells()) cells.push_back(s.apply(p));
    return Region(std::move(cells));
}

SlabGeometry::SlabGeometry(int k, PlanarBox window) : k_(k), window_(window) {
    if (k < 0) throw std::invalid_argument("SlabGeometry: k must be >= 0");
    if (window.empty()) throw std::invalid_argument("SlabGeometry: empty window");
    const int W = window.width(), H = window.height(), L = k + 1;
    n_vertices_ = W * H * L;
    neighbor_.assign(static_cast<std::size_t>(n_vertices_) * 6, -1);
    incident_.assign(static_cast<std::size_t>(n_vertices_) * 6, -1);

    // Vertex ids in (x, y, layer) lexicographic order.
    auto vid = [&](int x, int y, int l) {
        return ((x - window_.xmin) * H + (y - window_.ymin)) * L + l;
    };

    edges_.reserve(static_cast<std::size_t>(((W - 1) * H + W * (H - 1)) * L + W * H * k));
    for (int x = window_.xmin; x <= window_.xmax; ++x) {
        for (int y = window_.ymin; y <= window_.ymax; ++y) {
            for (int l = 0; l <= k_; ++l) {
                const int a = vid(x, y, l);
                struct Cand {
                    bool ok;
                    int b;
                    EdgeDir dir;
                };
                const Cand cands[3] = {
                    {x + 1 <= window_.xmax, x + 1 <= window_.xmax ? vid(x + 1, y, l) : -1, EdgeDir::XPos},
                    {y + 1 <= window_.ymax, y + 1 <= window_.ymax ? vid(x, y + 1, l) : -1, EdgeDir::YPos},
                    {l + 1 <= k_, l + 1 <= k_ ? vid(x, y, l + 1) : -1, EdgeDir::LayerPos},
                };
                for (const Cand& c : cands) {
                    if (!c.ok) continue;
                    const int e = static_cast<int>(edges_.size());
                    edges_.push_back({a, c.b, c.dir});
                    const int d = static_cast<int>(c.dir);
                    const int dback = d + 1;  // XNeg/YNeg/LayerNeg follow their positive twins
                    neighbor_[static_cast<std::size_t>(a) * 6 + d] = c.b;
                    neighbor_[static_cast<std::size_t>(c.b) * 6 + dback] = a;
                    incident_[static_cast<std::size_t>(a) * 6 + d] = e;
                    incident_[static_cast<std::size_t>(c.b) * 6 + dback] = e;
                }
            }
        }
    }
}

int SlabGeometry::vertex_id(SlabVertex v) const {
    if (!contains(v)) throw std::out_of_range("SlabGeometry::vertex_id: vertex outside geometry");
    const int H = window_.height(), L = k_ + 1;
    return ((v.x - window_.xmin) * H + (v.y - window_.ymin)) * L + v.layer;
}

SlabVertex SlabGeometry::vertex(int id) const {
    const int H = window_.height(), L = k_ + 1;
    const int l = id % L;
    const int rest = id / L;
    const int y = rest % H + window_.ymin;
    const int x = rest / H + window_.xmin;
    return {x, y, l};
}

int SlabGeometry::edge_between(int va, int vb) const {
    for (int d = 0; d < 6; ++d) {
        if (neighbor_[static_cast<std::size_t>(va) * 6 + d] == vb)
            return incident_[static_cast<std::size_t>(va) * 6 + d];
    }
    return -1;
}

std::uint64_t SlabGeometry::edge_identity(int e) const {
    const Edge& ed = edges_[e];
    const SlabVertex a = vertex(ed.a);
    const std::uint64_t ux = static_cast<std::uint64_t>(a.x + (1 << 20)) & 0x1FFFFF;
    const std::uint64_t uy = static_cast<std::uint64_t>(a.y + (1 << 20)) & 0x1FFFFF;
    const std::uint64_t ul = static_cast<std::uint64_t>(a.layer) & 0xFFFFF;
    const std::uint64_t ud = static_cast<std::uint64_t>(ed.dir_from_a) / 2;  // 0,1,2
    return (ux << 43) | (uy << 22) | (ul << 2) | ud;
}

std::vector<int> SlabGeometry::lift(const Region& r) const {
    std::vector<int> out;
    out.reserve(r.size() * static_cast<std::size_t>(k_ + 1));
    for (PlanarPoint p : r.cells()) {
        if (!window_.contains(p)) continue;
        for (int l = 0; l <= k_; ++l) out.push_back(vertex_id({p.x, p.y, l}));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> SlabGeometry::lifted_edges(const Region& r) const {
    std::vector<char> in(static_cast<std::size_t>(n_vertices_), 0);
    for (int v : lift(r)) in[static_cast<std::size_t>(v)] = 1;
    std::vector<int> out;
    for (int e = 0; e < edge_count(); ++e) {
        if (in[static_cast<std::size_t>(edges_[e].a)] && in[static_cast<std::size_t>(edges_[e].b)])
            out.push_back(e);
    }
    return out;
}

std::string SlabGeometry::describe_json() const {
    std::ostringstream os;
    os << "{\"k\":" << k_ << ",\"window\":[" << window_.xmin << "," << window_.xmax << ","
       << window_.ymin << "," << window_.ymax << "]}";
    return os.str();
}

std::string region_json(const Region& r) {
    std::ostringstream os;
    os << "[";
    bool first = true;
    for (PlanarPoint p : r.cells()) {
        if (!first) os << ",";
        first = false;
        os << "[" << p.x << "," << p.y << "]";
    }
    os << "]";
    return os.str();
}

}  // namespace slabperc
