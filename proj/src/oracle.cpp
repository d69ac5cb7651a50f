#include "slabperc/oracle.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "slabperc/cluster.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace slabperc {

RationalP parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const long num = std::stol(text.substr(0, slash));
        const long den = std::stol(text.substr(slash + 1));
        if (den <= 0 || num < 0 || num > den)
            throw std::invalid_argument("parse_rational: need 0 <= a/b <= 1");
        return {num, den};
    }
    // Decimal text: use the shortest fraction with a power-of-ten denominator.
    const double v = std::stod(text);
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("parse_rational: outside [0,1]");
    long den = 1;
    double scaled = v;
    while (std::abs(scaled - std::llround(scaled)) > 1e-9 && den < 1000000000L) {
        den *= 10;
        scaled = v * static_cast<double>(den);
    }
    return {std::lround(scaled), den};
}

std::string ExactProbability::as_fraction() const {
    BigInt g = boost::multiprecision::gcd(weight, denominator);
    if (g == 0) g = 1;
    std::ostringstream os;
    os << (weight / g) << "/" << (denominator / g);
    return os.str();
}

double ExactProbability::approx() const {
    return boost::multiprecision::cpp_rational(weight, denominator).convert_to<double>();
}

namespace {

void check_cap(const SlabGeometry& g, int cap) {
    if (g.edge_count() > cap)
        throw std::invalid_argument("oracle: edge count " + std::to_string(g.edge_count()) +
                                    " above enumeration cap " + std::to_string(cap));
}

Configuration config_from_mask(int n_edges, std::uint64_t mask) {
    Configuration c(n_edges);
    for (int e = 0; e < n_edges; ++e)
        if ((mask >> e) & 1) c.set(e, true);
    return c;
}

// Weight tables a^j and (b-a)^j for j = 0..E.
struct WeightTables {
    std::vector<BigInt> open_pow, closed_pow;
    WeightTables(RationalP p, int E) {
        open_pow.resize(static_cast<std::size_t>(E) + 1);
        closed_pow.resize(static_cast<std::size_t>(E) + 1);
        open_pow[0] = closed_pow[0] = 1;
        for (int j = 1; j <= E; ++j) {
            open_pow[static_cast<std::size_t>(j)] = open_pow[static_cast<std::size_t>(j) - 1] * p.num;
            closed_pow[static_cast<std::size_t>(j)] =
                closed_pow[static_cast<std::size_t>(j) - 1] * (p.den - p.num);
        }
    }
};

}  // namespace

void enumerate_configs(const SlabGeometry& g, const std::function<void(std::uint64_t)>& visit,
                       int cap) {
    check_cap(g, cap);
    const std::uint64_t total = 1ULL << g.edge_count();
    for (std::uint64_t m = 0; m < total; ++m) visit(m);
}

ExactProbability exact_probability_serial(const SlabGeometry& g, RationalP p,
                                          const std::function<bool(const Configuration&)>& event,
                                          const std::string& event_name, int cap) {
    check_cap(g, cap);
    const int E = g.edge_count();
    const WeightTables wt(p, E);
    const std::uint64_t total = 1ULL << E;
    BigInt weight = 0;
    Configuration c(E);
    for (std::uint64_t m = 0; m < total; ++m) {
        c = config_from_mask(E, m);
        if (event(c)) {
            const int open = std::popcount(m);
            weight += wt.open_pow[static_cast<std::size_t>(open)] *
                      wt.closed_pow[static_cast<std::size_t>(E - open)];
        }
    }
    ExactProbability out;
    out.weight = weight;
    out.denominator = boost::multiprecision::pow(BigInt(p.den), static_cast<unsigned>(E));
    out.edge_count = E;
    out.event = event_name;
    return out;
}

ExactProbability exact_probability(const SlabGeometry& g, RationalP p,
                                   const std::function<bool(const Configuration&)>& event,
                                   const std::string& event_name, int cap) {
    check_cap(g, cap);
    const int E = g.edge_count();
    const WeightTables wt(p, E);
    const std::uint64_t total = 1ULL << E;
    BigInt weight = 0;
#ifdef _OPENMP
#pragma omp parallel
    {
        BigInt local = 0;
        Configuration c(E);
#pragma omp for schedule(static)
        for (std::int64_t m = 0; m < static_cast<std::int64_t>(total); ++m) {
            c = config_from_mask(E, static_cast<std::uint64_t>(m));
            if (event(c)) {
                const int open = std::popcount(static_cast<std::uint64_t>(m));
                local += wt.open_pow[static_cast<std::size_t>(open)] *
                         wt.closed_pow[static_cast<std::size_t>(E - open)];
            }
        }
#pragma omp critical
        weight += local;
    }
#else
    return exact_probability_serial(g, p, event, event_name, cap);
#endif
    ExactProbability out;
    out.weight = weight;
    out.denominator = boost::multiprecision::pow(BigInt(p.den), static_cast<unsigned>(E));
    out.edge_count = E;
    out.event = event_name;
    return out;
}

std::vector<FrozenEventSpec> frozen_event_table() {
    std::vector<FrozenEventSpec> out;
    const PlanarBox w22{0, 1, 0, 1};  // 2x2 cells, 12 edges at k=1
    const PlanarBox w21{0, 1, 0, 0};  // 1x2 cells, 4 edges
    const PlanarBox w31{0, 2, 0, 0};  // 1x3 cells, 7 edges
    const Region full22 = rect_region(0, 1, 0, 1);
    const Region left = rect_region(0, 0, 0, 1), right = rect_region(1, 1, 0, 1);
    const Region bottom = rect_region(0, 1, 0, 0), top = rect_region(0, 1, 1, 1);
    const Region c00 = rect_region(0, 0, 0, 0), c11 = rect_region(1, 1, 1, 1);
    auto ev = [&](const std::string& id, PlanarBox win, RationalP p, bool unique, Region X,
                  Region Y, Region B) {
        out.push_back({id, 1, win, p, unique, std::move(X), std::move(Y), std::move(B)});
    };
    ev("w22_lr_conn_p12", w22, {1, 2}, false, left, right, full22);
    ev("w22_lr_uniq_p12", w22, {1, 2}, true, left, right, full22);
    ev("w22_corner_conn_p12", w22, {1, 2}, false, c00, c11, full22);
    ev("w22_tb_conn_p12", w22, {1, 2}, false, bottom, top, full22);
    ev("w22_lr_conn_p13", w22, {1, 3}, false, left, right, full22);
    ev("w22_corner_conn_p25", w22, {2, 5}, false, c00, c11, full22);
    ev("w22_tb_uniq_p12", w22, {1, 2}, true, bottom, top, full22);
    const Region a21 = rect_region(0, 0, 0, 0), b21 = rect_region(1, 1, 0, 0);
    const Region full21 = rect_region(0, 1, 0, 0);
    ev("w21_conn_p12", w21, {1, 2}, false, a21, b21, full21);
    ev("w21_conn_p13", w21, {1, 3}, false, a21, b21, full21);
    const Region a31 = rect_region(0, 0, 0, 0), b31 = rect_region(2, 2, 0, 0);
    const Region full31 = rect_region(0, 2, 0, 0);
    ev("w31_conn_p12", w31, {1, 2}, false, a31, b31, full31);
    ev("w31_uniq_p12", w31, {1, 2}, true, a31, b31, full31);
    ev("w31_conn_p35", w31, {3, 5}, false, a31, b31, full31);
    return out;
}

ExactProbability frozen_exact(const FrozenEventSpec& spec) {
    SlabGeometry g(spec.k, spec.window);
    auto event = [&](const Configuration& c) {
        return spec.unique ? unique_cluster(g, c, spec.X, spec.Y, spec.B)
                           : connected(g, c, spec.X, spec.Y, spec.B);
    };
    return exact_probability(g, spec.p, event, spec.id);
}

}  // namespace slabperc
