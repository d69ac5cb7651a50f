#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slabperc/cluster.hpp"
#include "slabperc/config.hpp"
#include "slabperc/geometry.hpp"
#include "slabperc/oracle.hpp"

namespace slabperc {

/// A path in the slab, as a sequence of geometry vertex ids. Consecutive
/// vertices are adjacent; the sequence is self-avoiding.
struct Path {
    std::vector<int> vertices;
    bool empty() const { return vertices.empty(); }
    int front() const { return vertices.front(); }
    int back() const { return vertices.back(); }
};

enum class PathCmp { Less, Equal, Greater };

/// Total order on self-avoiding paths: strict prefixes first, then start
/// vertex order, then the first divergent emanating edge.
PathCmp compare_paths(const SlabGeometry& g, const Path& a, const Path& b);

/// Rank of the edge (v, w) among edges emanating from v: the direction order
/// +x, -x, +y, -y, +layer, -layer. Invariant under planar translations.
int emanating_rank(const SlabGeometry& g, int v, int w);

/// The minimal open self-avoiding path from the lifted source to the lifted
/// target inside the lifted ambient region, or nullopt when not connected.
/// Ordered depth-first search: starts in vertex order, edges in emanating
/// order; branches outside a cluster meeting the target are pruned.
std::optional<Path> min_path(const SlabGeometry& g, const Configuration& c, const Region& source,
                             const Region& target, const Region& ambient);

/// Brute-force reference: enumerates every open self-avoiding path and takes
/// the compare_paths minimum. No pruning; neighbors visited in reverse order
/// so the search order is independent of min_path's.
std::optional<Path> min_path_bruteforce(const SlabGeometry& g, const Configuration& c,
                                        const Region& source, const Region& target,
                                        const Region& ambient);

/// Candidate gluing sites: planar points z of B' whose column meets gamma_min
/// (P1) and from whose B_1-neighborhood an open path reaches the lifted S'
/// with planar projection at L1 distance exactly 1 from gamma_min's
/// projection (P2; the whole projection avoids gamma_min's columns).
std::vector<PlanarPoint> compute_U(const SlabGeometry& g, const Configuration& c,
                                   const Path& gamma_min, const Region& Bprime,
                                   const Region& Sprime);

/// Closes every open edge {u,v} with u in a lifted U-column and v connected
/// to the lifted S' by an open path.
Configuration surgery_phi(const SlabGeometry& g, const Configuration& c,
                          const std::vector<PlanarPoint>& U, const Region& Sprime);

/// Edge ids with at least one endpoint in a lifted U-column (the exact
/// support bound of the closing surgery).
std::vector<int> edges_adjacent_to_columns(const SlabGeometry& g,
                                           const std::vector<PlanarPoint>& cells);

/// Smallest R >= 2 such that any three distinct neighbors of any site can be
/// joined to any three distinct boundary sites of the lifted B_R box by
/// pairwise vertex-disjoint paths avoiding the center. Verified by
/// unit-vertex-capacity max-flow over every (layer, triple, triple) case.
/// k = 0 is rejected.
int feasible_R(int k, int r_max = 4);

/// Single max-flow feasibility probe used by feasible_R (exposed for tests).
bool disjoint_triples_feasible(int k, int R);

/// The five-region instance the gluing machinery runs on.
struct GluingInstance {
    int k = 1;
    PlanarBox window;
    Region source;     // S_{3n} analog
    Region Z;          // target segment of the minimal path
    Region Yplus, Yminus;
    Region Bprime, Sprime;
    Region ambient;    // ambient region of the A event and gamma_min (B_{3n} analog)
    Region target_ambient;  // ambient of the glued connection (B_{3n} U B'_n)
    int R = 1;         // surgery box radius used on this instance
    RationalP p{1, 2};
};

/// The frozen micro layouts: a 4x2-cell slab of width 1 for the surgery
/// audits and a 3x2 one for the full minimal-path sweep.
GluingInstance micro_instance();
GluingInstance micro_instance_tiny();

struct SurgeryRecord {
    std::string source_config;  // portable dump
    std::vector<int> gamma_min;
    std::vector<PlanarPoint> U;
    PlanarPoint z{};
    int z_site = -1;
    int u = -1, v = -1, w = -1;
    int u_prime = -1, v_prime = -1, w_prime = -1;
    std::vector<int> path_u, path_v, path_w, pi;
    std::vector<int> opened, closed;
};

struct PsiResult {
    bool ok = false;
    std::string error;
    Configuration result;
    SurgeryRecord record;
};

/// The rewiring surgery at a candidate site z: reroutes gamma_min through z
/// and attaches it to the lifted S' with three disjoint paths inside the
/// lifted B_R(z) box.
PsiResult surgery_psi(const SlabGeometry& g, const Configuration& c, PlanarPoint z, int R,
                      const GluingInstance& inst, const Path& gamma_min);

/// The unique site on gamma_min(config) connected to the lifted S' without
/// using gamma_min edges; -1 when absent, -2 when not unique.
int recover_marked_site(const SlabGeometry& g, const Configuration& c, const GluingInstance& inst);

/// Multi-valued-map audit: exhaustively verifies the two hypotheses
/// (multiplicity >= t; preimages differ on at most s edges) and the exact
/// conclusion inequality P[A] <= (2/min(p,1-p))^s / t * P[B].
struct Lemma5Report {
    long long count_A = 0, count_B = 0;
    BigInt weight_A, weight_B, denominator;
    long s_given = 0, t_given = 1;
    long s_tight = 0;  // max preimage-difference support over images
    long t_tight = 0;  // min image multiplicity over A
    bool hyp_images_in_B = true;
    bool hyp_multiplicity = true;
    bool hyp_locality = true;
    bool conclusion_holds = false;        // at (s_given, t_given)
    bool conclusion_tight_holds = false;  // at (s_tight, t_tight)
    std::vector<std::string> witnesses;   // first few violating configurations
};

Lemma5Report audit_lemma5(const SlabGeometry& g, RationalP p,
                          const std::function<bool(const Configuration&)>& event_A,
                          const std::function<bool(const Configuration&)>& event_B,
                          const std::function<std::vector<Configuration>(const Configuration&)>& map,
                          long s, long t, int cap = kDefaultEnumerationCap);

/// Exhaustive audit of the whole gluing machinery on a micro instance.
struct MicroAuditReport {
    GluingInstance instance;
    long long configs = 0;
    long long count_A = 0;          // A event (source to Z)
    long long count_arms = 0;       // both arms
    long long count_X = 0;          // X = A and arms and not target
    long long count_target = 0;
    long long count_no_two_arms = 0;
    long min_U = 0, max_U = 0;      // over X
    long s_fact1 = 0;               // max count of edges adjacent to U columns
    long s_fact2 = 0;               // max count of edges of the lifted B_{R+1} box
    long s_fact1_tight = 0, s_fact2_tight = 0;
    long t_fact2 = 0;               // min |U| over X
    long long violations_minpath = 0;
    long long violations_fact1 = 0;      // two arms survive Phi
    long long violations_phi_invariance = 0;  // gamma_min or U changed by Phi
    long long violations_fact1_locality = 0;
    long long violations_psi_construct = 0;   // surgery signalled
    long long violations_psi_target = 0;      // image misses the glued event
    long long violations_psi_injective = 0;
    long long violations_psi_locality = 0;
    long long violations_psi_stability = 0;   // minimal-path stability
    long long violations_psi_marked_site = 0; // unique-marked-site recovery
    bool fact1_inequality = false;
    bool fact2_inequality = false;
    BigInt weight_X, weight_no_two_arms, weight_target, denominator;
    std::vector<std::string> witnesses;
    bool minpath_checked = false;   // brute-force minimal-path comparison ran
    long long zero_violations() const {
        return violations_minpath + violations_fact1 + violations_phi_invariance +
               violations_fact1_locality + violations_psi_construct + violations_psi_target +
               violations_psi_injective + violations_psi_locality + violations_psi_stability +
               violations_psi_marked_site;
    }
};

/// check_minpath: compare min_path with the brute-force minimum on every
/// configuration (not just X members); intended for the tiny instance.
MicroAuditReport run_micro_audit(const GluingInstance& inst, bool check_minpath_all,
                                 bool check_minpath_on_X = true);

}  // namespace slabperc
