#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <string>

#include "slabperc/config.hpp"
#include "slabperc/geometry.hpp"

namespace slabperc {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational p = num/den with 0 <= num <= den.
struct RationalP {
    long num = 1;
    long den = 2;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

RationalP parse_rational(const std::string& text);  // "a/b" or a decimal

/// Exact event probability from full enumeration: value = weight / den,
/// where weight sums a^#open * (b-a)^#closed over the event configurations
/// and den = b^E.
struct ExactProbability {
    BigInt weight;
    BigInt denominator;
    int edge_count = 0;
    std::string event;

    std::string as_fraction() const;  // reduced "num/den"
    double approx() const;
};

inline constexpr int kDefaultEnumerationCap = 24;

/// Visits all 2^E configurations of the geometry; the visitor receives the
/// configuration index (bit e = state of edge e). Refuses E above the cap.
void enumerate_configs(const SlabGeometry& g, const std::function<void(std::uint64_t)>& visit,
                       int cap = kDefaultEnumerationCap);

/// Exact probability of an event given as a predicate on configurations.
/// The scan partitions the index range across workers; reduction is addition.
ExactProbability exact_probability(const SlabGeometry& g, RationalP p,
                                   const std::function<bool(const Configuration&)>& event,
                                   const std::string& event_name = "",
                                   int cap = kDefaultEnumerationCap);

/// Serial reference implementation kept alongside the parallel scan.
ExactProbability exact_probability_serial(const SlabGeometry& g, RationalP p,
                                          const std::function<bool(const Configuration&)>& event,
                                          const std::string& event_name = "",
                                          int cap = kDefaultEnumerationCap);

/// The frozen micro-event set: small slab connection/uniqueness events whose
/// exact probabilities are tabulated once (data/oracle_frozen.json) and then
/// serve as regression constants for the Monte Carlo path.
struct FrozenEventSpec {
    std::string id;
    int k = 1;
    PlanarBox window;
    RationalP p{1, 2};
    bool unique = false;
    Region X, Y, B;
};

std::vector<FrozenEventSpec> frozen_event_table();
ExactProbability frozen_exact(const FrozenEventSpec& spec);

}  // namespace slabperc
