#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "slabperc/cluster.hpp"
#include "slabperc/oracle.hpp"

using namespace slabperc;

namespace {

// Reference reachability that never touches the union-find code path.
bool closure_connected(const SlabGeometry& g, const Configuration& c, const Region& X,
                       const Region& Y, const Region& B) {
    const std::vector<int> verts = g.lift(B);
    std::vector<char> in(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : verts) in[static_cast<std::size_t>(v)] = 1;
    std::vector<char> reach(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : g.lift(X)) reach[static_cast<std::size_t>(v)] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int e = 0; e < g.edge_count(); ++e) {
            if (!c.open(e)) continue;
            const auto& ed = g.edge(e);
            if (!in[static_cast<std::size_t>(ed.a)] || !in[static_cast<std::size_t>(ed.b)]) continue;
            const char r = reach[static_cast<std::size_t>(ed.a)] | reach[static_cast<std::size_t>(ed.b)];
            if (r && (!reach[static_cast<std::size_t>(ed.a)] || !reach[static_cast<std::size_t>(ed.b)])) {
                reach[static_cast<std::size_t>(ed.a)] = reach[static_cast<std::size_t>(ed.b)] = 1;
                changed = true;
            }
        }
    }
    for (int v : g.lift(Y))
        if (reach[static_cast<std::size_t>(v)]) return true;
    return false;
}

}  // namespace

TEST_CASE("enumeration counts and normalization") {
    SlabGeometry one(0, PlanarBox{0, 1, 0, 0});
    long count = 0;
    enumerate_configs(one, [&](std::uint64_t) { ++count; });
    CHECK(count == 2);

    SlabGeometry twelve(1, PlanarBox{0, 1, 0, 1});
    count = 0;
    enumerate_configs(twelve, [&](std::uint64_t) { ++count; });
    CHECK(count == 4096);

    const auto norm = exact_probability(twelve, {1, 3}, [](const Configuration&) { return true; });
    CHECK(norm.weight == norm.denominator);
    CHECK(norm.as_fraction() == "1/1");

    SlabGeometry big(1, PlanarBox{-1, 1, -1, 1});  // 33 edges
    CHECK_THROWS_AS(enumerate_configs(big, [](std::uint64_t) {}), std::invalid_argument);
}

TEST_CASE("one edge and two parallel routes") {
    SlabGeometry g1(0, PlanarBox{0, 1, 0, 0});
    const auto p13 = exact_probability(
        g1, {1, 3}, [](const Configuration& c) { return c.open(0); }, "edge");
    CHECK(p13.as_fraction() == "1/3");

    // Width-1 slab on two cells: the two-column connection happens exactly
    // when one of the two horizontal edges is open, so 1 - (1-p)^2.
    SlabGeometry g2(1, PlanarBox{0, 1, 0, 0});
    REQUIRE(g2.edge_count() == 4);
    const Region B = rect_region(0, 1, 0, 0);
    const Region X = rect_region(0, 0, 0, 0), Y = rect_region(1, 1, 0, 0);
    const auto conn = exact_probability(
        g2, {1, 2}, [&](const Configuration& c) { return connected(g2, c, X, Y, B); }, "conn");
    CHECK(conn.as_fraction() == "3/4");
    const auto conn13 = exact_probability(
        g2, {1, 3}, [&](const Configuration& c) { return connected(g2, c, X, Y, B); }, "conn");
    CHECK(conn13.as_fraction() == "5/9");  // 1 - (2/3)^2
}

TEST_CASE("complement sums to one") {
    SlabGeometry g(1, PlanarBox{0, 1, 0, 1});
    const Region B = rect_region(0, 1, 0, 1);
    const Region X = rect_region(0, 0, 0, 1), Y = rect_region(1, 1, 0, 1);
    auto event = [&](const Configuration& c) { return connected(g, c, X, Y, B); };
    const auto yes = exact_probability(g, {2, 5}, event);
    const auto no =
        exact_probability(g, {2, 5}, [&](const Configuration& c) { return !event(c); });
    CHECK(yes.weight + no.weight == yes.denominator);
}

TEST_CASE("union-find and transitive closure agree exactly") {
    SlabGeometry g(1, PlanarBox{0, 1, 0, 1});
    const Region B = rect_region(0, 1, 0, 1);
    const Region X = rect_region(0, 0, 0, 1), Y = rect_region(1, 1, 0, 1);
    const auto via_uf = exact_probability(
        g, {1, 2}, [&](const Configuration& c) { return connected(g, c, X, Y, B); }, "uf");
    const auto via_closure = exact_probability(
        g, {1, 2}, [&](const Configuration& c) { return closure_connected(g, c, X, Y, B); },
        "closure");
    CHECK(via_uf.weight == via_closure.weight);
    CHECK(via_uf.denominator == 4096);
}

TEST_CASE("serial scan equals the parallel scan") {
    SlabGeometry g(1, PlanarBox{0, 1, 0, 1});
    const Region B = rect_region(0, 1, 0, 1);
    const Region X = rect_region(0, 0, 0, 0), Y = rect_region(1, 1, 1, 1);
    auto event = [&](const Configuration& c) { return connected(g, c, X, Y, B); };
    const auto par = exact_probability(g, {1, 2}, event);
    const auto ser = exact_probability_serial(g, {1, 2}, event);
    CHECK(par.weight == ser.weight);
    CHECK(par.denominator == ser.denominator);
}

TEST_CASE("rational parsing") {
    CHECK(parse_rational("1/2").num == 1);
    CHECK(parse_rational("1/2").den == 2);
    CHECK(parse_rational("0.35").num == 35);
    CHECK(parse_rational("0.35").den == 100);
    CHECK_THROWS_AS(parse_rational("3/2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("-1/2"), std::invalid_argument);
}

TEST_CASE("frozen table matches the checked-in constants") {
    const auto table = frozen_event_table();
    CHECK(table.size() >= 10);
    for (const auto& spec : table) {
        SlabGeometry g(spec.k, spec.window);
        CHECK(g.edge_count() <= 12);
        CHECK(spec.k == 1);
    }
    std::ifstream f(std::string(SLABPERC_DATA_DIR) + "/oracle_frozen.json");
    REQUIRE_MESSAGE(f.good(), "data/oracle_frozen.json missing; run slabperc oracle-freeze");
    nlohmann::json frozen;
    f >> frozen;
    for (const auto& spec : table) {
        REQUIRE(frozen.contains(spec.id));
        CHECK(frozen_exact(spec).as_fraction() == frozen[spec.id].get<std::string>());
    }
}
