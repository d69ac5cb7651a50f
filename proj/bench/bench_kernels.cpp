// Benchmark of the OpenMP kernels against their serial reference
// implementations. Results must agree exactly; the table reports throughput.

#include <chrono>
#include <cstdio>

#include "slabperc/estimators.hpp"
#include "slabperc/oracle.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace slabperc;

namespace {

double seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_battery() {
    const int n = 12;
    SlabGeometry g(1, PlanarBox{-n, n, -n, n});
    std::vector<BatteryGroup> groups(1);
    groups[0].graph = RegionGraph(g, box_region(n));
    CompiledEvent ev;
    ev.unique = true;
    ev.src = groups[0].graph.compact_lift(g, box_region(2));
    ev.dst = groups[0].graph.compact_lift(g, boundary_region(n));
    groups[0].events.push_back(ev);
    const long N = 20000;

    auto t0 = std::chrono::steady_clock::now();
    const BatteryResult ser = run_battery_serial(g, 0.55, N, 7, groups);
    const double ts = seconds(t0);
    t0 = std::chrono::steady_clock::now();
    const BatteryResult par = run_battery(g, 0.55, N, 7, groups);
    const double tp = seconds(t0);
    const bool same = ser.hits == par.hits;
    std::printf("%-28s %10.2fs %10.2fs %7.2fx   %s\n", "uniqueness crossing (n=12)", ts, tp,
                ts / tp, same ? "identical" : "MISMATCH");
    if (!same) std::exit(1);
}

void bench_oracle() {
    SlabGeometry g(1, PlanarBox{0, 2, 0, 1});  // 20 edges
    const Region B = rect_region(0, 2, 0, 1);
    const Region X = rect_region(0, 0, 0, 1), Y = rect_region(2, 2, 0, 1);
    auto event = [&](const Configuration& c) { return connected(g, c, X, Y, B); };

    auto t0 = std::chrono::steady_clock::now();
    const auto ser = exact_probability_serial(g, {1, 2}, event);
    const double ts = seconds(t0);
    t0 = std::chrono::steady_clock::now();
    const auto par = exact_probability(g, {1, 2}, event);
    const double tp = seconds(t0);
    const bool same = ser.weight == par.weight;
    std::printf("%-28s %10.2fs %10.2fs %7.2fx   %s\n", "exact enumeration (2^20)", ts, tp, ts / tp,
                same ? "identical" : "MISMATCH");
    if (!same) std::exit(1);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("%-28s %11s %11s %8s\n", "kernel", "serial", "parallel", "speedup");
    bench_battery();
    bench_oracle();
    return 0;
}
