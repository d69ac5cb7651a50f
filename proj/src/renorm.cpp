#include "slabperc/renorm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slabperc {

void GoodEdgeSpec::validate() const {
    if (n < 1 || u3n < 0 || u3n > n) throw std::invalid_argument("GoodEdgeSpec: bad scales");
    const int dx = z_prime.x - z.x, dy = z_prime.y - z.y;
    const bool axis = (std::abs(dx) == 4 * n && dy == 0) || (dx == 0 && std::abs(dy) == 4 * n);
    if (!axis) throw std::invalid_argument("GoodEdgeSpec: z' - z must be a 4n lattice step");
}

Region GoodEdgeSpec::connection_region() const {
    const int mx = (z.x + z_prime.x) / 2, my = (z.y + z_prime.y) / 2;
    return translate(box_region(6 * n), mx, my);
}

Region GoodEdgeSpec::block(bool prime) const {
    const PlanarPoint c = prime ? z_prime : z;
    return translate(box_region(3 * n), c.x, c.y);
}

PlanarBox GoodEdgeSpec::dependency_window() const {
    const Region all = connection_region().united(block(false)).united(block(true));
    return all.bounding_box();
}

bool good_edge(const SlabGeometry& g, const Configuration& c, const GoodEdgeSpec& spec) {
    spec.validate();
    const Region rn = spec.connection_region();
    const Region bz = spec.block(false), bzp = spec.block(true);
    const PlanarBox w = g.window();
    const PlanarBox need = spec.dependency_window();
    if (need.xmin < w.xmin || need.xmax > w.xmax || need.ymin < w.ymin || need.ymax > w.ymax)
        throw std::invalid_argument("good_edge: dependency regions leave the geometry window");

    const Region s3z = translate(box_region(spec.u3n), spec.z.x, spec.z.y);
    const Region s3zp = translate(box_region(spec.u3n), spec.z_prime.x, spec.z_prime.y);
    const Region dbz = translate(boundary_region(3 * spec.n), spec.z.x, spec.z.y);
    const Region dbzp = translate(boundary_region(3 * spec.n), spec.z_prime.x, spec.z_prime.y);
    return connected(g, c, s3z, s3zp, rn) && unique_cluster(g, c, s3z, dbz, bz) &&
           unique_cluster(g, c, s3zp, dbzp, bzp);
}

double peierls_series_bound(double eta, int* cutoff, double* tail_out) {
    const int L = 300;
    double sum = 0.0;
    for (int l = 4; l <= L; ++l) {
        const int m = (l + 8) / 9;  // one edge every nine contour steps
        sum += static_cast<double>(l) * std::pow(3.0, l) * std::pow(eta, m);
    }
    // Tail: l 3^l eta^(ceil(l/9)) <= l r^l with r = 3 eta^(1/9), summed in
    // closed form. Diverges when r >= 1.
    const double r = 3.0 * std::pow(eta, 1.0 / 9.0);
    double tail = std::numeric_limits<double>::infinity();
    if (r < 1.0) {
        // eta^(ceil(l/9)) <= eta^(l/9 ... ) needs care: ceil >= l/9, eta < 1.
        tail = std::pow(r, L + 1) * ((L + 1) * (1.0 - r) + r) / ((1.0 - r) * (1.0 - r));
    }
    if (cutoff) *cutoff = L;
    if (tail_out) *tail_out = tail;
    return sum + tail;
}

EtaDerivation peierls_eta() {
    EtaDerivation d;
    d.eta = 1e-6;
    d.series_bound = peierls_series_bound(d.eta, &d.cutoff, &d.tail_bound);
    if (!(d.series_bound < 1.0))
        throw std::logic_error("peierls_eta: certified series bound not below one");
    return d;
}

namespace {

std::vector<BatteryGroup> good_edge_groups(const SlabGeometry& g, const GoodEdgeSpec& spec) {
    const Region s3z = translate(box_region(spec.u3n), spec.z.x, spec.z.y);
    const Region s3zp = translate(box_region(spec.u3n), spec.z_prime.x, spec.z_prime.y);
    std::vector<BatteryGroup> groups(3);
    groups[0].graph = RegionGraph(g, spec.connection_region());
    {
        CompiledEvent ev;
        ev.src = groups[0].graph.compact_lift(g, s3z);
        ev.dst = groups[0].graph.compact_lift(g, s3zp);
        groups[0].events.push_back(std::move(ev));
    }
    groups[1].graph = RegionGraph(g, spec.block(false));
    {
        CompiledEvent ev;
        ev.unique = true;
        ev.src = groups[1].graph.compact_lift(g, s3z);
        ev.dst = groups[1].graph.compact_lift(
            g, translate(boundary_region(3 * spec.n), spec.z.x, spec.z.y));
        groups[1].events.push_back(std::move(ev));
    }
    groups[2].graph = RegionGraph(g, spec.block(true));
    {
        CompiledEvent ev;
        ev.unique = true;
        ev.src = groups[2].graph.compact_lift(g, s3zp);
        ev.dst = groups[2].graph.compact_lift(
            g, translate(boundary_region(3 * spec.n), spec.z_prime.x, spec.z_prime.y));
        groups[2].events.push_back(std::move(ev));
    }
    return groups;
}

}  // namespace

Estimate estimate_good(int k, const GoodEdgeSpec& spec, double p, long n_samples,
                       std::uint64_t seed) {
    spec.validate();
    SlabGeometry g(k, spec.dependency_window());
    const auto groups = good_edge_groups(g, spec);
    const std::vector<JointSpec> joints = {{0x7, 0, 0}};
    const BatteryResult r = run_battery(g, p, n_samples, seed, groups, joints);
    return make_estimate(r.joint_hits[0], n_samples, seed);
}

Certificate certify(int k, int n, int u3n, double p, long n_samples, std::uint64_t seed) {
    GoodEdgeSpec spec;
    spec.n = n;
    spec.u3n = u3n;
    spec.z = {0, 0};
    spec.z_prime = {4 * n, 0};
    Certificate cert;
    cert.k = k;
    cert.n = n;
    cert.p = p;
    cert.n_samples = n_samples;
    cert.u3n = u3n;
    const EtaDerivation d = peierls_eta();
    cert.eta = d.eta;
    cert.series_bound = d.series_bound;
    cert.estimate = estimate_good(k, spec, p, n_samples, seed);
    {
        SlabGeometry g(k, spec.dependency_window());
        std::vector<char> seen(static_cast<std::size_t>(g.edge_count()), 0);
        for (const auto& grp : good_edge_groups(g, spec))
            for (int e : grp.graph.edge_ids()) seen[static_cast<std::size_t>(e)] = 1;
        cert.dependent_edges = std::count(seen.begin(), seen.end(), 1);
    }
    cert.pass = cert.estimate.ci_low >= 1.0 - cert.eta;
    return cert;
}

int coarse_linf_distance(const GoodEdgeSpec& a, const GoodEdgeSpec& b) {
    const int step = 4 * a.n;
    int best = INT32_MAX;
    for (PlanarPoint pa : {a.z, a.z_prime})
        for (PlanarPoint pb : {b.z, b.z_prime}) {
            const int d = std::max(std::abs(pa.x - pb.x), std::abs(pa.y - pb.y)) / step;
            best = std::min(best, d);
        }
    return best;
}

bool dependency_regions_disjoint(const GoodEdgeSpec& a, const GoodEdgeSpec& b) {
    const Region ra = a.connection_region().united(a.block(false)).united(a.block(true));
    const Region rb = b.connection_region().united(b.block(false)).united(b.block(true));
    for (PlanarPoint p : ra.cells())
        if (rb.contains(p)) return false;
    return true;
}

}  // namespace slabperc
