#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "slabperc/geometry.hpp"

using namespace slabperc;

TEST_CASE("vertex and edge counts") {
    SlabGeometry flat(0, PlanarBox{-1, 1, -1, 1});
    CHECK(flat.vertex_count() == 9);
    CHECK(flat.edge_count() == 12);

    SlabGeometry slab(1, PlanarBox{-1, 1, -1, 1});
    CHECK(slab.vertex_count() == 18);
    CHECK(slab.edge_count() == 33);  // 24 horizontal + 9 vertical

    SlabGeometry column(2, PlanarBox{0, 0, 0, 0});
    CHECK(column.vertex_count() == 3);
    CHECK(column.edge_count() == 2);

    CHECK_THROWS_AS(SlabGeometry(1, PlanarBox{}), std::invalid_argument);
    CHECK_THROWS_AS(SlabGeometry(-1, PlanarBox{0, 1, 0, 1}), std::invalid_argument);
}

TEST_CASE("edge count formula across windows") {
    for (int k : {0, 1, 2}) {
        for (int W : {1, 2, 4}) {
            for (int H : {1, 3}) {
                SlabGeometry g(k, PlanarBox{0, W - 1, 0, H - 1});
                const int horizontal = ((W - 1) * H + W * (H - 1)) * (k + 1);
                const int vertical = W * H * k;
                CHECK(g.edge_count() == horizontal + vertical);
            }
        }
    }
}

TEST_CASE("regions") {
    CHECK(boundary_region(2).size() == 16);
    CHECK(segment_region(3, -1, 1) == Region({{3, -1}, {3, 0}, {3, 1}}));
    CHECK(translate(box_region(1), 2, 5) == rect_region(1, 3, 4, 6));
    CHECK_THROWS_AS(segment_region(0, 2, 1), std::invalid_argument);

    for (int n = 1; n <= 5; ++n) {
        CHECK(box_region(n).contains_region(box_region(n - 1)));
        CHECK(box_region(n).minus(box_region(n - 1)) == boundary_region(n));
        CHECK(static_cast<int>(boundary_region(n).size()) == 8 * n);
    }
    CHECK(box_region(3).size() == 49);
}

TEST_CASE("edge indexing round-trips") {
    SlabGeometry g(1, PlanarBox{-2, 2, -1, 3});
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        CHECK(g.edge_between(ed.a, ed.b) == e);
        CHECK(g.edge_between(ed.b, ed.a) == e);
    }
    // Vertex ids follow the (x, y, layer) vertex order.
    for (int v = 0; v + 1 < g.vertex_count(); ++v) {
        CHECK(g.vertex(v) < g.vertex(v + 1));
        CHECK(g.vertex_id(g.vertex(v)) == v);
    }
}

TEST_CASE("box symmetries") {
    const int n = 2;
    SlabGeometry g(1, PlanarBox{-n, n, -n, n});
    const SlabVertex v{1, 2, 1};

    CHECK(apply_symmetry(BoxSymmetry{0}, v, n) == v);  // identity

    const BoxSymmetry reflect{1};  // x -> -x
    CHECK(apply_symmetry(reflect, apply_symmetry(reflect, v, n), n) == v);

    // Rotation by pi/2: swap then negate one coordinate.
    BoxSymmetry rot{5};
    SlabVertex w = v;
    for (int i = 0; i < 4; ++i) w = apply_symmetry(rot, w, n);
    CHECK(w == v);

    CHECK_THROWS_AS(apply_symmetry(reflect, SlabVertex{3, 0, 0}, n), std::invalid_argument);

    // Every symmetry maps the edge set of the lifted box onto itself.
    for (BoxSymmetry s : box_symmetries()) {
        std::vector<char> seen(static_cast<std::size_t>(g.edge_count()), 0);
        for (int e = 0; e < g.edge_count(); ++e) {
            const auto& ed = g.edge(e);
            const int a = g.vertex_id(s.apply(g.vertex(ed.a)));
            const int b = g.vertex_id(s.apply(g.vertex(ed.b)));
            const int image = g.edge_between(a, b);
            REQUIRE(image >= 0);
            CHECK(!seen[static_cast<std::size_t>(image)]);
            seen[static_cast<std::size_t>(image)] = 1;
        }
        CHECK(s.inverse().apply(s.apply(v)) == v);
    }
}

TEST_CASE("box family") {
    BoxFamily fam;
    fam.n = 4;
    fam.u = 1;
    fam.u3 = 2;
    fam.alpha = 2;
    fam.y = 3;
    CHECK(fam.box() == box_region(4));
    CHECK(fam.big_box().size() == 25 * 25);
    CHECK(fam.primed_box() == rect_region(4, 12, -1, 7));
    CHECK(fam.primed_center() == rect_region(7, 9, 2, 4));
    // The Z segment overlaps each Y segment in exactly one point.
    const Region zy_plus = fam.z_segment().minus(fam.z_segment().minus(fam.y_plus()));
    const Region zy_minus = fam.z_segment().minus(fam.z_segment().minus(fam.y_minus()));
    CHECK(zy_plus.size() == 1);
    CHECK(zy_minus.size() == 1);
    CHECK(zy_plus.contains({12, 5}));
    CHECK(zy_minus.contains({12, 1}));
    // All three segments sit on the line x = 3n.
    const Region all_segments = fam.z_segment().united(fam.y_plus()).united(fam.y_minus());
    for (PlanarPoint p : all_segments.cells()) CHECK(p.x == 12);
}

TEST_CASE("lift and serialization") {
    SlabGeometry g(2, PlanarBox{0, 3, 0, 2});
    const Region r = rect_region(1, 2, 0, 1);
    CHECK(g.lift(r).size() == r.size() * 3);
    CHECK(g.lifted_edges(rect_region(1, 1, 1, 1)).size() == 2);  // one column
    CHECK(g.describe_json() == "{\"k\":2,\"window\":[0,3,0,2]}");
    CHECK(region_json(segment_region(0, 0, 1)) == "[[0,0],[0,1]]");
}
