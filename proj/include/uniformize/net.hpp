#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uniformize/metric_space.hpp"

namespace uniformize {

// r-separated cover of the space by balls B(center_i, radius_i) with
// radius_i in [r, 2r], carrying the separation-gap property: for i != j the
// value d(x_i, x_j) - r_i - r_j never falls strictly inside (0, c*r).
struct Net {
    Length r = 0;
    Length c = 0;                   // gap constant, 1/neighbor_bound
    int neighbor_bound = 1;         // most other centers within 4r of a center
    std::vector<Vertex> centers;
    std::vector<Length> radii;

    int size() const { return static_cast<int>(centers.size()); }
};

struct NetReport {
    bool separation_ok = true;
    bool radius_range_ok = true;
    bool coverage_ok = true;
    bool gap_ok = true;

    // First counterexample for each failed check.
    std::optional<std::pair<int, int>> separation_pair;  // center indices
    std::optional<int> radius_index;
    std::optional<Vertex> uncovered_vertex;
    std::optional<std::pair<int, int>> gap_pair;
    Length gap_value = 0;

    // Pairs whose gap lands within tolerance of 0 or c*r; legal (the
    // forbidden interval is open) but flagged.
    int ambiguous_pairs = 0;

    bool pass() const { return separation_ok && radius_range_ok && coverage_ok && gap_ok; }
    std::string summary() const;
};

// Matching tolerance used by radius assignment and the verifier.
inline Length net_gap_tolerance(Length r) { return 1e-9 * r; }

// Greedy maximal r-separated net, scanning vertex ids in ascending order.
std::vector<Vertex> maximal_separated_net(const MetricSpace& space, Length r);

// Inductive radius assignment realizing the separation gap. Throws if the
// centers are not r-separated, or if no allowed radius exists (impossible by
// the counting argument; checked defensively).
Net assign_radii(const MetricSpace& space, const std::vector<Vertex>& centers, Length r);

// Independent re-check of all four net guarantees by direct pairwise
// computation. Failures are report content, never exceptions.
NetReport verify_net(const MetricSpace& space, const Net& net);

} // namespace uniformize
