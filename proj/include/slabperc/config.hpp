#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slabperc/geometry.hpp"

namespace slabperc {

struct SeedSpec {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

/// One open/closed bit per edge of a geometry, bit-packed, together with the
/// (p, seed, stream) provenance of the sample that produced it (p < 0 for
/// hand-built configurations).
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(int n_edges, bool open_all = false);

    int edge_count() const { return n_edges_; }
    bool open(int e) const { return (words_[static_cast<std::size_t>(e) >> 6] >> (e & 63)) & 1; }
    void set(int e, bool value) {
        const std::size_t w = static_cast<std::size_t>(e) >> 6;
        const std::uint64_t bit = 1ULL << (e & 63);
        if (value)
            words_[w] |= bit;
        else
            words_[w] &= ~bit;
    }
    int open_count() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    double p = -1.0;
    SeedSpec seed;

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.n_edges_ == b.n_edges_ && a.words_ == b.words_;
    }

    std::string hex_bits() const;  // nibble j holds bits 4j..4j+3, low bit first
    static Configuration from_hex(int n_edges, const std::string& hex);

private:
    int n_edges_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Bernoulli(p) sample; every edge open independently with probability p.
/// Equals threshold(uniform field, p) by construction, so samples at p <= p'
/// are nested for a fixed (seed, stream).
Configuration sample(const SlabGeometry& g, double p, SeedSpec seed);

/// The coupled uniform field u : edge -> [0,1).
std::vector<double> sample_uniform_field(const SlabGeometry& g, SeedSpec seed);

/// Opens edge e iff u[e] < p.
Configuration threshold(const std::vector<double>& field, double p);

/// New configuration differing from `base` exactly on open_set ∪ close_set.
/// The two sets must be disjoint.
Configuration mutate(const Configuration& base, const std::vector<int>& open_set,
                     const std::vector<int>& close_set);

/// Portable dump: hex bitstring plus provenance JSON.
std::string dump_portable(const SlabGeometry& g, const Configuration& c);

}  // namespace slabperc
