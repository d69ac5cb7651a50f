#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "slabperc/config.hpp"
#include "slabperc/rng.hpp"

using namespace slabperc;

TEST_CASE("degenerate probabilities") {
    SlabGeometry g(1, PlanarBox{-1, 1, -1, 1});
    const Configuration all = sample(g, 1.0, {42, 0});
    CHECK(all.open_count() == g.edge_count());
    const Configuration none = sample(g, 0.0, {42, 0});
    CHECK(none.open_count() == 0);
    CHECK_THROWS_AS(sample(g, 1.5, {42, 0}), std::invalid_argument);
    CHECK_THROWS_AS(sample(g, -0.1, {42, 0}), std::invalid_argument);
}

TEST_CASE("determinism and provenance") {
    SlabGeometry g(1, PlanarBox{0, 5, 0, 5});
    const Configuration a = sample(g, 0.37, {7, 3});
    const Configuration b = sample(g, 0.37, {7, 3});
    CHECK(a == b);
    CHECK(a.p == 0.37);
    CHECK(a.seed.master == 7);
    CHECK(a.seed.stream == 3);
    const Configuration c = sample(g, 0.37, {7, 4});
    CHECK_FALSE(a == c);
}

TEST_CASE("single-edge open fraction matches the binomial rate") {
    // One edge: a k=0 domino window.
    SlabGeometry g(0, PlanarBox{0, 1, 0, 0});
    REQUIRE(g.edge_count() == 1);
    const double p = 0.3;
    const long n = 1000000;
    long open = 0;
    for (long s = 0; s < n; ++s)
        if (edge_uniform(99, static_cast<std::uint64_t>(s), g.edge_identity(0)) < p) ++open;
    const double frac = static_cast<double>(open) / static_cast<double>(n);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    CHECK(std::abs(frac - p) <= 3 * sigma);
}

TEST_CASE("monotone coupling") {
    SlabGeometry g(1, PlanarBox{0, 4, 0, 4});
    const auto field = sample_uniform_field(g, {11, 0});
    CHECK(threshold(field, 0.0).open_count() == 0);
    CHECK(threshold(field, 1.0).open_count() == g.edge_count());
    Configuration prev = threshold(field, 0.0);
    for (double p : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        const Configuration cur = threshold(field, p);
        for (int e = 0; e < g.edge_count(); ++e)
            if (prev.open(e)) CHECK(cur.open(e));
        prev = cur;
    }
    // sample() is the thresholded field.
    CHECK(threshold(field, 0.37) == sample(g, 0.37, {11, 0}));
}

TEST_CASE("mutate") {
    SlabGeometry g(1, PlanarBox{0, 2, 0, 2});
    const Configuration c = sample(g, 0.5, {5, 0});
    CHECK(mutate(c, {}, {}) == c);

    std::vector<int> was_closed, was_open;
    for (int e = 0; e < g.edge_count() && (was_closed.size() < 3 || was_open.size() < 3); ++e)
        (c.open(e) ? was_open : was_closed).push_back(e);
    const Configuration m = mutate(c, was_closed, was_open);
    CHECK(mutate(m, was_open, was_closed) == c);

    int hamming = 0;
    for (int e = 0; e < g.edge_count(); ++e) hamming += c.open(e) != m.open(e);
    CHECK(hamming == static_cast<int>(was_closed.size() + was_open.size()));

    CHECK_THROWS_AS(mutate(c, {0, 1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("stream cross-correlation is null") {
    SlabGeometry g(0, PlanarBox{0, 350, 0, 140});
    const int E = g.edge_count();
    REQUIRE(E >= 90000);
    const Configuration a = sample(g, 0.5, {123, 0});
    const Configuration b = sample(g, 0.5, {123, 1});
    double ma = 0, mb = 0, mab = 0;
    for (int e = 0; e < E; ++e) {
        ma += a.open(e);
        mb += b.open(e);
        mab += a.open(e) && b.open(e);
    }
    ma /= E;
    mb /= E;
    mab /= E;
    const double corr = (mab - ma * mb) / std::sqrt(ma * (1 - ma) * mb * (1 - mb));
    CHECK(std::abs(corr) <= 4.0 / std::sqrt(static_cast<double>(E)));
}

TEST_CASE("hex dump round-trips") {
    SlabGeometry g(1, PlanarBox{0, 3, 0, 2});
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Configuration c = sample(g, 0.4, {77, s});
        const Configuration back = Configuration::from_hex(g.edge_count(), c.hex_bits());
        CHECK(back == c);
    }
    CHECK_THROWS_AS(Configuration::from_hex(8, "zz"), std::invalid_argument);
    const std::string dump = dump_portable(g, sample(g, 0.4, {77, 0}));
    CHECK(dump.find("\"bits\"") != std::string::npos);
}

TEST_CASE("coupling extends across slab widths") {
    // The same planar edge gets the same uniform variable at every k, so the
    // open set at width k embeds in the open set at width k+1.
    SlabGeometry g0(0, PlanarBox{0, 6, 0, 6});
    SlabGeometry g1(1, PlanarBox{0, 6, 0, 6});
    const Configuration c0 = sample(g0, 0.5, {9, 4});
    const Configuration c1 = sample(g1, 0.5, {9, 4});
    for (int e = 0; e < g0.edge_count(); ++e) {
        const auto& ed = g0.edge(e);
        const SlabVertex a = g0.vertex(ed.a), b = g0.vertex(ed.b);
        const int e1 = g1.edge_between(g1.vertex_id(a), g1.vertex_id(b));
        REQUIRE(e1 >= 0);
        CHECK(c0.open(e) == c1.open(e1));
    }
}
