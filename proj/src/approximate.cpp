#include "uniformize/approximate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace uniformize {

// ============================================================================
// Domain
// ============================================================================

Domain Domain::create(const MetricSpace& space, Mask mask) {
    if (mask.universe() != space.size())
        throw std::invalid_argument("mask belongs to a different space");
    if (mask.empty()) throw std::invalid_argument("domain must be nonempty");

    Domain d;
    d.parent_.assign(static_cast<std::size_t>(space.size()), kNoVertex);
    for (Vertex v = 0; v < space.size(); ++v) {
        if (mask.contains(v)) {
            d.root_ = v;
            break;
        }
    }
    d.parent_[static_cast<std::size_t>(d.root_)] = d.root_;
    std::vector<Vertex> queue{d.root_};
    int reached = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Vertex v = queue[head];
        for (const auto& a : space.arcs(v)) {
            if (mask.contains(a.to) && d.parent_[static_cast<std::size_t>(a.to)] == kNoVertex) {
                d.parent_[static_cast<std::size_t>(a.to)] = v;
                queue.push_back(a.to);
                ++reached;
            }
        }
    }
    if (reached != mask.size())
        throw std::invalid_argument("domain must be connected in the induced subgraph");
    d.mask_ = std::move(mask);
    return d;
}

const Mask& ScaleTrace::set_at(int k) const {
    if (k < 1 || k > top_level()) throw std::out_of_range("no such construction level");
    return k == 1 ? initial : levels[static_cast<std::size_t>(k) - 2].set;
}

// ============================================================================
// Construction steps
// ============================================================================

Length compute_delta(Length c, Length tau) {
    if (!(c > 0) || !(tau > 0))
        throw std::invalid_argument("scale ratio needs positive gap constant and depth");
    return std::min(c / (20 + c), tau / (5 + tau));
}

Domain initial_set_inner(const MetricSpace& space, const Domain& domain, Length tau,
                         Vertex base_point) {
    if (!domain.contains(base_point))
        throw std::invalid_argument("base point lies outside the domain");
    const DistanceField depth = space.multi_source_distance(domain.mask().complement());
    if (!(depth[base_point] > tau)) {
        std::ostringstream os;
        os << "base point depth " << depth[base_point] << " does not exceed tau " << tau;
        throw std::invalid_argument(os.str());
    }
    Mask superlevel(space.size());
    for (Vertex v = 0; v < space.size(); ++v)
        if (depth[v] > tau) superlevel.insert(v);
    return Domain::create(space, space.connected_component(superlevel, base_point));
}

Domain initial_set_outer(const Domain& domain) { return domain; }

DilateResult dilate_step(const MetricSpace& space, const Domain& current, Length scale) {
    if (!(scale > 0)) throw std::invalid_argument("dilation scale must be positive");

    const Net net = assign_radii(space, maximal_separated_net(space, scale), scale);
    const Mask fringe = space.neighborhood(current.mask(), scale);
    const DistanceField to_fringe = space.multi_source_distance(fringe);

    // A ball meets the fringe exactly when its center is within its radius
    // of the fringe (closed balls).
    std::vector<int> selected;
    for (int i = 0; i < net.size(); ++i) {
        if (to_fringe[net.centers[static_cast<std::size_t>(i)]] <=
            net.radii[static_cast<std::size_t>(i)])
            selected.push_back(i);
    }

    Mask next(space.size());
    for (int i : selected) {
        const Vertex src[1] = {net.centers[static_cast<std::size_t>(i)]};
        for (const auto& [v, d] : space.explore(src, net.radii[static_cast<std::size_t>(i)])) {
            (void)d;
            next.insert(v);
        }
    }
    if (!fringe.is_subset_of(next))
        throw std::logic_error("dilation lost part of the dilated set");

    return {Domain::create(space, std::move(next)), net, std::move(selected)};
}

Length choose_tau_inner(const MetricSpace& space, const Domain& domain, Length epsilon,
                        Vertex base_point) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    if (!domain.contains(base_point))
        throw std::invalid_argument("base point lies outside the domain");

    const DistanceField depth = space.multi_source_distance(domain.mask().complement());
    Mask deep(space.size());
    for (Vertex v = 0; v < space.size(); ++v)
        if (depth[v] > epsilon) deep.insert(v);

    Length tau = epsilon;
    for (int iter = 0; iter < 200; ++iter) {
        if (depth[base_point] > tau) {
            Mask superlevel(space.size());
            for (Vertex v = 0; v < space.size(); ++v)
                if (depth[v] > tau) superlevel.insert(v);
            const Mask comp = space.connected_component(superlevel, base_point);
            if (deep.is_subset_of(comp)) return tau;
        }
        tau /= 2;
    }
    throw std::logic_error("no admissible depth parameter found");
}

// ============================================================================
// Full construction
// ============================================================================

namespace {

struct ConstructionRun {
    std::vector<TraceLevel> levels;
    Domain result;
    bool fixpoint = false;
    int max_neighbor_bound = 1;
};

ConstructionRun run_levels(const MetricSpace& space, const Domain& initial, Length delta,
                           int max_levels) {
    ConstructionRun run;
    Domain current = initial;
    Length scale = delta;
    for (int k = 1; k <= max_levels; ++k, scale *= delta) {
        if (5 * scale < space.min_edge()) {
            // Nothing below the resolution can be added: the growth bound
            // keeps every later level inside the current set.
            run.fixpoint = true;
            break;
        }
        DilateResult step = dilate_step(space, current, scale);
        run.max_neighbor_bound = std::max(run.max_neighbor_bound, step.net.neighbor_bound);
        const bool stationary = step.next.mask() == current.mask();
        run.levels.push_back(
            {k, scale, std::move(step.net), std::move(step.selected), step.next.mask()});
        current = std::move(step.next);
        if (stationary) {
            run.fixpoint = true;
            break;
        }
    }
    run.result = std::move(current);
    return run;
}

Vertex deepest_vertex(const MetricSpace& space, const Domain& domain) {
    const DistanceField depth = space.multi_source_distance(domain.mask().complement());
    Vertex best = domain.root();
    for (Vertex v = 0; v < space.size(); ++v)
        if (domain.contains(v) && depth[v] > depth[best]) best = v;
    return best;
}

} // namespace

ScaleTrace approximate(const MetricSpace& space, const Domain& domain,
                       const ApproxConfig& config) {
    if (!(config.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    if (config.max_levels < 1) throw std::invalid_argument("max_levels must be at least 1");

    ScaleTrace trace;
    trace.mode = config.mode;
    trace.delta_mode = config.delta_mode;
    trace.epsilon = config.epsilon;
    trace.max_levels = config.max_levels;

    Domain initial = domain;
    if (config.mode == ApproxMode::inner) {
        trace.base_point = config.base_point.value_or(deepest_vertex(space, domain));
        trace.tau = config.tau.value_or(
            choose_tau_inner(space, domain, config.epsilon, trace.base_point));
        initial = initial_set_inner(space, domain, trace.tau, trace.base_point);
    } else {
        trace.tau = config.epsilon;
        initial = initial_set_outer(domain);
    }
    trace.initial = initial.mask();

    const Length depth_cap = trace.tau / (5 + trace.tau);
    ConstructionRun run;
    if (config.delta_mode == DeltaMode::faithful) {
        // The cross-scale gap constant must dominate every level's realized
        // neighbor bound; start optimistic and tighten until consistent.
        Length c = config.gap_constant.value_or(1.0);
        for (int round = 0;; ++round) {
            if (round >= 8)
                throw std::logic_error("gap constant failed to stabilize across scales");
            trace.delta = compute_delta(c, trace.tau);
            run = run_levels(space, initial, trace.delta, config.max_levels);
            const Length realized = 1.0 / static_cast<Length>(run.max_neighbor_bound);
            if (realized >= c) break;
            if (config.gap_constant.has_value())
                throw std::invalid_argument("supplied gap constant exceeds what the nets admit");
            c = realized;
        }
        trace.gap_constant = c;
    } else {
        if (!(config.delta > 0) || !(config.delta < 1))
            throw std::invalid_argument("practical delta must lie in (0,1)");
        trace.delta = std::min(config.delta, depth_cap);
        run = run_levels(space, initial, trace.delta, config.max_levels);
        trace.gap_constant = 1.0 / static_cast<Length>(run.max_neighbor_bound);
    }

    trace.levels = std::move(run.levels);
    trace.result = std::move(run.result);
    trace.reached_fixpoint = run.fixpoint;

    // Containment guarantees; failures here are construction bugs.
    if (config.mode == ApproxMode::inner) {
        const Mask reach = space.neighborhood(trace.initial, trace.tau);
        if (!trace.result.mask().is_subset_of(reach))
            throw std::logic_error("inner result escaped the depth buffer");
        if (!reach.is_subset_of(domain.mask()))
            throw std::logic_error("inner result escaped the domain");
    } else {
        if (!domain.mask().is_subset_of(trace.result.mask()))
            throw std::logic_error("outer result does not contain the domain");
        const Mask reach = space.neighborhood(domain.mask(), config.epsilon);
        if (!trace.result.mask().is_subset_of(reach))
            throw std::logic_error("outer result exceeded the closeness bound");
    }
    return trace;
}

} // namespace uniformize
