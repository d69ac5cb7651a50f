#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slabperc/config.hpp"
#include "slabperc/estimators.hpp"
#include "slabperc/geometry.hpp"

namespace slabperc {

/// A coarse edge {z, z'} of the 4n Z^2 lattice with its block scale and the
/// central-box scale u_{3n} (so S_{3n} = B_{u3n}).
struct GoodEdgeSpec {
    int n = 1;
    int u3n = 0;
    PlanarPoint z{0, 0};
    PlanarPoint z_prime{0, 0};  // z' - z in {±4n e1, ±4n e2}

    void validate() const;
    Region connection_region() const;  // R_n = (z+z')/2 + B_{6n}
    Region block(bool prime) const;    // z + B_{3n} or z' + B_{3n}
    /// Planar bounding box of every region the event reads.
    PlanarBox dependency_window() const;
};

/// Conjunction of the three block events: the connection of the two
/// translated S_{3n} boxes inside R_n and the two uniqueness events.
bool good_edge(const SlabGeometry& g, const Configuration& c, const GoodEdgeSpec& spec);

/// Certified Peierls threshold for 4-dependent bond percolation on Z^2:
/// with marginals above 1 - eta the series
///   sum_{l>=4} l 3^l eta^{ceil(l/9)}
/// stays below one, so no dual contour surrounds the origin almost surely.
/// One edge in every nine along a contour keeps mutual contour distance
/// above four, hence independence.
struct EtaDerivation {
    double eta = 0.0;
    double series_bound = 0.0;  // certified upper bound of the series
    int cutoff = 0;             // terms summed explicitly
    double tail_bound = 0.0;    // geometric bound for the rest
    std::string exponent_rule = "ceil(l/9)";
    std::string contour_count_bound = "l*3^l";
};

EtaDerivation peierls_eta();
/// The certified series bound at an arbitrary eta (monotone in eta).
double peierls_series_bound(double eta, int* cutoff = nullptr, double* tail = nullptr);

Estimate estimate_good(int k, const GoodEdgeSpec& spec, double p, long n_samples,
                       std::uint64_t seed);

struct Certificate {
    int k = 0;
    int n = 0;
    double p = 0.0;
    long n_samples = 0;
    int u3n = 0;
    double eta = 0.0;
    double series_bound = 0.0;
    Estimate estimate;
    long dependent_edges = 0;  // the event reads only this many edges
    bool pass = false;         // ci_low >= 1 - eta
};

Certificate certify(int k, int n, int u3n, double p, long n_samples, std::uint64_t seed);

/// Structural 4-dependence: dependency regions of two coarse edges at
/// coarse graph distance above four are disjoint.
bool dependency_regions_disjoint(const GoodEdgeSpec& a, const GoodEdgeSpec& b);
int coarse_linf_distance(const GoodEdgeSpec& a, const GoodEdgeSpec& b);

}  // namespace slabperc
