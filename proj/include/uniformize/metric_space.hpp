#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace uniformize {

using Vertex = std::int32_t;
using Length = double;

inline constexpr Length kInfLength = std::numeric_limits<Length>::infinity();
inline constexpr Vertex kNoVertex = -1;

struct SpaceEdge {
    Vertex u = 0;
    Vertex v = 0;
    Length w = 1.0;
};

// Subset of the vertices of one space, dense membership plus a count.
class Mask {
public:
    Mask() = default;
    explicit Mask(int universe) : in_(static_cast<std::size_t>(universe), 0) {}

    static Mask full(int universe);
    static Mask of(int universe, std::span<const Vertex> ids);

    int universe() const { return static_cast<int>(in_.size()); }
    int size() const { return count_; }
    bool empty() const { return count_ == 0; }
    bool contains(Vertex v) const { return in_[static_cast<std::size_t>(v)] != 0; }

    void insert(Vertex v);
    void erase(Vertex v);

    std::vector<Vertex> ids() const;        // ascending
    Mask complement() const;
    bool is_subset_of(const Mask& other) const;

    bool operator==(const Mask& other) const { return in_ == other.in_; }

private:
    std::vector<std::uint8_t> in_;
    int count_ = 0;
};

// Per-vertex nonnegative lengths, +inf allowed (distance to an empty set).
struct DistanceField {
    std::vector<Length> value;

    Length operator[](Vertex v) const { return value[static_cast<std::size_t>(v)]; }
    int size() const { return static_cast<int>(value.size()); }
};

struct DoublingEstimate {
    int constant = 1;                   // max cover count observed
    std::vector<Length> scales;
    std::vector<int> worst_per_scale;   // aligned with scales
};

// Deterministic center sampling for the doubling probe. max_centers <= 0
// means every vertex is used as a ball center.
struct SampleSpec {
    int max_centers = 0;
    std::uint64_t seed = 1;
};

// Finite geodesic metric space: a connected weighted graph carrying the
// shortest-path metric. Immutable after construction; all queries are const
// and safe to issue from multiple threads.
class MetricSpace {
public:
    struct Arc {
        Vertex to;
        Length w;
    };

    static MetricSpace from_edges(int n, const std::vector<SpaceEdge>& edges);

    int size() const { return n_; }
    int edge_count() const { return static_cast<int>(arcs_.size() / 2); }
    Length min_edge() const { return min_edge_; }
    Length resolution() const { return max_edge_; }     // largest edge weight
    Length quasiconvexity() const { return 1.0; }       // graph-geodesic metric

    std::span<const Arc> arcs(Vertex v) const;

    // Undirected edge list with u < v, ascending.
    std::vector<SpaceEdge> edge_list() const;

    Length distance(Vertex a, Vertex b) const;

    // Exact up to 2000 vertices, double-sweep lower bound above. Cached.
    Length diameter() const;

    // Full single-source field, memoized per source.
    std::shared_ptr<const DistanceField> distance_field(Vertex source) const;

    DistanceField multi_source_distance(const Mask& sources) const;

    // All vertices with d(source set, v) <= limit together with exact
    // distances, ascending by vertex id.
    std::vector<std::pair<Vertex, Length>> explore(std::span<const Vertex> sources,
                                                   Length limit) const;

    // Shortest path a -> b; ties broken toward the smallest predecessor id so
    // the result is reproducible. Includes both endpoints.
    std::vector<Vertex> geodesic(Vertex a, Vertex b) const;

    Mask ball(Vertex center, Length radius) const;
    Mask neighborhood(const Mask& set, Length radius) const;
    Mask connected_component(const Mask& mask, Vertex seed) const;

    DoublingEstimate estimate_doubling(std::span<const Length> scales,
                                       const SampleSpec& sample = {}) const;

private:
    MetricSpace() = default;

    void check_vertex(Vertex v) const;
    DistanceField dijkstra(Vertex source, std::vector<Vertex>* pred) const;

    int n_ = 0;
    std::vector<std::int64_t> offsets_;
    std::vector<Arc> arcs_;
    Length min_edge_ = 0;
    Length max_edge_ = 0;

    // Behind a pointer so the space stays movable.
    mutable std::unique_ptr<std::mutex> cache_mu_;
    mutable std::unordered_map<Vertex, std::shared_ptr<const DistanceField>> field_cache_;
    mutable Length diameter_ = -1;
    std::size_t cache_cap_ = 0;
};

} // namespace uniformize
