#pragma once

#include <optional>
#include <vector>

#include "uniformize/metric_space.hpp"
#include "uniformize/net.hpp"

namespace uniformize {

enum class ApproxMode { inner, outer };
enum class DeltaMode { faithful, practical };

// Nonempty connected vertex set with a spanning-tree certificate of its
// connectivity in the induced subgraph.
class Domain {
public:
    static Domain create(const MetricSpace& space, Mask mask);

    const Mask& mask() const { return mask_; }
    bool contains(Vertex v) const { return mask_.contains(v); }
    int size() const { return mask_.size(); }
    Vertex root() const { return root_; }

    // parent[v] = previous vertex on the tree path to the root; the root maps
    // to itself and non-members to kNoVertex.
    const std::vector<Vertex>& tree_parent() const { return parent_; }

private:
    Mask mask_;
    std::vector<Vertex> parent_;
    Vertex root_ = kNoVertex;
};

struct ApproxConfig {
    ApproxMode mode = ApproxMode::inner;
    Length epsilon = 1.0;
    DeltaMode delta_mode = DeltaMode::faithful;

    // Practical-mode scale ratio; clamped to tau/(5+tau) so the containment
    // guarantees survive. Ignored in faithful mode.
    Length delta = 0.25;

    // Depth parameter. Inner mode picks one via choose_tau_inner when unset;
    // outer mode always uses tau = epsilon.
    std::optional<Length> tau;

    // Inner-mode base point; defaults to the deepest vertex of the domain
    // (smallest id on ties).
    std::optional<Vertex> base_point;

    // Cross-scale gap constant override; computed by a dry pass when unset.
    std::optional<Length> gap_constant;

    int max_levels = 64;
};

struct TraceLevel {
    int level = 1;              // k; the net is built at scale delta^k
    Length scale = 0;
    Net net;
    std::vector<int> selected;  // indices into net.centers, ascending
    Mask set;                   // E_{k+1} = union of the selected balls
};

// Full construction transcript: parameters, the starting set E_1, one entry
// per dilation level, and the resulting domain.
struct ScaleTrace {
    ApproxMode mode = ApproxMode::inner;
    DeltaMode delta_mode = DeltaMode::faithful;
    Length epsilon = 0;
    Length tau = 0;
    Length delta = 0;
    Length gap_constant = 0;    // cross-scale c
    Vertex base_point = kNoVertex;
    int max_levels = 0;

    Mask initial;               // E_1
    std::vector<TraceLevel> levels;
    Domain result;
    bool reached_fixpoint = false;

    // E_k for k in [1, levels.size()+1].
    const Mask& set_at(int k) const;
    int top_level() const { return static_cast<int>(levels.size()) + 1; }
    bool faithful() const { return delta_mode == DeltaMode::faithful; }
};

struct DilateResult {
    Domain next;
    Net net;
    std::vector<int> selected;
};

// min{c/(20+c), tau/(5+tau)}.
Length compute_delta(Length c, Length tau);

// Connected component of {v : dist(v, complement of domain) > tau}
// containing base_point.
Domain initial_set_inner(const MetricSpace& space, const Domain& domain, Length tau,
                         Vertex base_point);

Domain initial_set_outer(const Domain& domain);

// One dilation level: build the scale-level net, select every ball that
// meets neighborhood(current, scale), and take the union of the selected
// balls. The result contains neighborhood(current, scale).
DilateResult dilate_step(const MetricSpace& space, const Domain& current, Length scale);

// Largest tau from {epsilon, epsilon/2, epsilon/4, ...} such that the
// component of {depth > tau} containing base_point includes every vertex
// with depth > epsilon.
Length choose_tau_inner(const MetricSpace& space, const Domain& domain, Length epsilon,
                        Vertex base_point);

// The full multi-scale construction.
ScaleTrace approximate(const MetricSpace& space, const Domain& domain,
                       const ApproxConfig& config);

} // namespace uniformize
