#include "slabperc/config.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

#include "slabperc/rng.hpp"

namespace slabperc {

Configuration::Configuration(int n_edges, bool open_all) : n_edges_(n_edges) {
    words_.assign((static_cast<std::size_t>(n_edges) + 63) / 64, 0);
    if (open_all) {
        for (auto& w : words_) w = ~0ULL;
        if (n_edges & 63) words_.back() = (1ULL << (n_edges & 63)) - 1;
    }
}

int Configuration::open_count() const {
    int c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
}

std::string Configuration::hex_bits() const {
    static const char* digits = "0123456789abcdef";
    const int n_nibbles = (n_edges_ + 3) / 4;
    std::string out(static_cast<std::size_t>(n_nibbles), '0');
    for (int j = 0; j < n_nibbles; ++j) {
        int v = 0;
        for (int b = 0; b < 4; ++b) {
            const int e = 4 * j + b;
            if (e < n_edges_ && open(e)) v |= 1 << b;
        }
        out[static_cast<std::size_t>(j)] = digits[v];
    }
    return out;
}

Configuration Configuration::from_hex(int n_edges, const std::string& hex) {
    Configuration c(n_edges);
    if (hex.size() != static_cast<std::size_t>((n_edges + 3) / 4))
        throw std::invalid_argument("Configuration::from_hex: length mismatch");
    for (std::size_t j = 0; j < hex.size(); ++j) {
        const char ch = hex[j];
        int v;
        if (ch >= '0' && ch <= '9')
            v = ch - '0';
        else if (ch >= 'a' && ch <= 'f')
            v = ch - 'a' + 10;
        else
            throw std::invalid_argument("Configuration::from_hex: bad digit");
        for (int b = 0; b < 4; ++b) {
            const int e = static_cast<int>(4 * j) + b;
            if (e < n_edges && ((v >> b) & 1)) c.set(e, true);
        }
    }
    return c;
}

Configuration sample(const SlabGeometry& g, double p, SeedSpec seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("sample: p outside [0,1]");
    Configuration c(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        if (edge_uniform(seed.master, seed.stream, g.edge_identity(e)) < p) c.set(e, true);
    }
    c.p = p;
    c.seed = seed;
    return c;
}

std::vector<double> sample_uniform_field(const SlabGeometry& g, SeedSpec seed) {
    std::vector<double> u(static_cast<std::size_t>(g.edge_count()));
    for (int e = 0; e < g.edge_count(); ++e)
        u[static_cast<std::size_t>(e)] = edge_uniform(seed.master, seed.stream, g.edge_identity(e));
    return u;
}

Configuration threshold(const std::vector<double>& field, double p) {
    Configuration c(static_cast<int>(field.size()));
    for (int e = 0; e < c.edge_count(); ++e)
        if (field[static_cast<std::size_t>(e)] < p) c.set(e, true);
    c.p = p;
    return c;
}

Configuration mutate(const Configuration& base, const std::vector<int>& open_set,
                     const std::vector<int>& close_set) {
    std::vector<char> opening(static_cast<std::size_t>(base.edge_count()), 0);
    for (int e : open_set) opening[static_cast<std::size_t>(e)] = 1;
    for (int e : close_set)
        if (opening[static_cast<std::size_t>(e)])
            throw std::invalid_argument("mutate: open_set and close_set overlap");
    Configuration c = base;
    for (int e : open_set) c.set(e, true);
    for (int e : close_set) c.set(e, false);
    return c;
}

std::string dump_portable(const SlabGeometry& g, const Configuration& c) {
    std::ostringstream os;
    os << "{\"geometry\":" << g.describe_json() << ",\"edges\":" << c.edge_count()
       << ",\"bits\":\"" << c.hex_bits() << "\",\"p\":" << c.p << ",\"seed\":" << c.seed.master
       << ",\"stream\":" << c.seed.stream << "}";
    return os.str();
}

}  // namespace slabperc
