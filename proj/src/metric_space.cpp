#include "uniformize/metric_space.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>

#include "uniformize/rng.hpp"

namespace uniformize {

// ============================================================================
// Mask
// ============================================================================

Mask Mask::full(int universe) {
    Mask m(universe);
    std::fill(m.in_.begin(), m.in_.end(), std::uint8_t{1});
    m.count_ = universe;
    return m;
}

Mask Mask::of(int universe, std::span<const Vertex> ids) {
    Mask m(universe);
    for (Vertex v : ids) m.insert(v);
    return m;
}

void Mask::insert(Vertex v) {
    auto& cell = in_[static_cast<std::size_t>(v)];
    if (!cell) {
        cell = 1;
        ++count_;
    }
}

void Mask::erase(Vertex v) {
    auto& cell = in_[static_cast<std::size_t>(v)];
    if (cell) {
        cell = 0;
        --count_;
    }
}

std::vector<Vertex> Mask::ids() const {
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(count_));
    for (Vertex v = 0; v < universe(); ++v)
        if (in_[static_cast<std::size_t>(v)]) out.push_back(v);
    return out;
}

Mask Mask::complement() const {
    Mask m(universe());
    for (Vertex v = 0; v < universe(); ++v)
        if (!in_[static_cast<std::size_t>(v)]) m.insert(v);
    return m;
}

bool Mask::is_subset_of(const Mask& other) const {
    if (universe() != other.universe()) return false;
    for (Vertex v = 0; v < universe(); ++v)
        if (in_[static_cast<std::size_t>(v)] && !other.in_[static_cast<std::size_t>(v)])
            return false;
    return true;
}

// ============================================================================
// Dijkstra scratch: stamped arrays so bounded runs reset in O(touched).
// ============================================================================

namespace {

struct Scratch {
    std::vector<Length> dist;
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;

    void prepare(int n) {
        if (static_cast<int>(dist.size()) < n) {
            dist.resize(static_cast<std::size_t>(n));
            stamp.assign(static_cast<std::size_t>(n), 0);
            epoch = 0;
        }
        ++epoch;
        if (epoch == 0) {  // wrapped
            std::fill(stamp.begin(), stamp.end(), 0);
            epoch = 1;
        }
    }

    bool seen(Vertex v) const { return stamp[static_cast<std::size_t>(v)] == epoch; }
    Length get(Vertex v) const { return seen(v) ? dist[static_cast<std::size_t>(v)] : kInfLength; }
    void set(Vertex v, Length d) {
        stamp[static_cast<std::size_t>(v)] = epoch;
        dist[static_cast<std::size_t>(v)] = d;
    }
};

thread_local Scratch tls_scratch;

using HeapItem = std::pair<Length, Vertex>;
using MinHeap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>>;

} // namespace

// ============================================================================
// MetricSpace
// ============================================================================

MetricSpace MetricSpace::from_edges(int n, const std::vector<SpaceEdge>& edges) {
    if (n < 1) throw std::invalid_argument("metric space needs at least one vertex");
    MetricSpace s;
    s.n_ = n;

    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (const auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw std::invalid_argument("edge endpoint out of range");
        if (e.u == e.v) throw std::invalid_argument("self-loops are not allowed");
        if (!(e.w > 0)) throw std::invalid_argument("edge weights must be positive");
        ++degree[static_cast<std::size_t>(e.u)];
        ++degree[static_cast<std::size_t>(e.v)];
    }

    s.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int v = 0; v < n; ++v)
        s.offsets_[static_cast<std::size_t>(v) + 1] =
            s.offsets_[static_cast<std::size_t>(v)] + degree[static_cast<std::size_t>(v)];
    s.arcs_.resize(static_cast<std::size_t>(s.offsets_.back()));

    std::vector<std::int64_t> cursor(s.offsets_.begin(), s.offsets_.end() - 1);
    for (const auto& e : edges) {
        s.arcs_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.u)]++)] = {e.v, e.w};
        s.arcs_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.v)]++)] = {e.u, e.w};
    }
    // Deterministic arc order regardless of input edge order.
    for (int v = 0; v < n; ++v) {
        auto first = s.arcs_.begin() + s.offsets_[static_cast<std::size_t>(v)];
        auto last = s.arcs_.begin() + s.offsets_[static_cast<std::size_t>(v) + 1];
        std::sort(first, last, [](const Arc& a, const Arc& b) {
            return a.to != b.to ? a.to < b.to : a.w < b.w;
        });
    }

    if (!edges.empty()) {
        s.min_edge_ = kInfLength;
        for (const auto& e : edges) {
            s.min_edge_ = std::min(s.min_edge_, e.w);
            s.max_edge_ = std::max(s.max_edge_, e.w);
        }
    }

    // Connectivity.
    std::vector<std::uint8_t> reach(static_cast<std::size_t>(n), 0);
    std::vector<Vertex> stack{0};
    reach[0] = 1;
    int found = 1;
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (const Arc& a : s.arcs(v)) {
            if (!reach[static_cast<std::size_t>(a.to)]) {
                reach[static_cast<std::size_t>(a.to)] = 1;
                ++found;
                stack.push_back(a.to);
            }
        }
    }
    if (found != n) throw std::invalid_argument("graph is not connected");

    // Memoized fields: bounded footprint, insert-only (keeps results
    // independent of thread timing).
    const std::size_t budget_doubles = 20'000'000;
    s.cache_cap_ = std::max<std::size_t>(4, budget_doubles / static_cast<std::size_t>(n));
    s.cache_mu_ = std::make_unique<std::mutex>();
    return s;
}

std::span<const MetricSpace::Arc> MetricSpace::arcs(Vertex v) const {
    const auto lo = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v)]);
    const auto hi = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v) + 1]);
    return {arcs_.data() + lo, hi - lo};
}

std::vector<SpaceEdge> MetricSpace::edge_list() const {
    std::vector<SpaceEdge> edges;
    edges.reserve(arcs_.size() / 2);
    for (Vertex u = 0; u < n_; ++u)
        for (const Arc& a : arcs(u))
            if (u < a.to) edges.push_back({u, a.to, a.w});
    return edges;
}

void MetricSpace::check_vertex(Vertex v) const {
    if (v < 0 || v >= n_)
        throw std::invalid_argument("vertex id " + std::to_string(v) + " out of range");
}

DistanceField MetricSpace::dijkstra(Vertex source, std::vector<Vertex>* pred) const {
    DistanceField field;
    field.value.assign(static_cast<std::size_t>(n_), kInfLength);
    if (pred) pred->assign(static_cast<std::size_t>(n_), kNoVertex);

    MinHeap heap;
    field.value[static_cast<std::size_t>(source)] = 0;
    if (pred) (*pred)[static_cast<std::size_t>(source)] = source;
    heap.push({0, source});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > field.value[static_cast<std::size_t>(u)]) continue;
        for (const Arc& a : arcs(u)) {
            const Length nd = d + a.w;
            auto& slot = field.value[static_cast<std::size_t>(a.to)];
            if (nd < slot) {
                slot = nd;
                if (pred) (*pred)[static_cast<std::size_t>(a.to)] = u;
                heap.push({nd, a.to});
            } else if (pred && nd == slot && u < (*pred)[static_cast<std::size_t>(a.to)]) {
                (*pred)[static_cast<std::size_t>(a.to)] = u;  // smallest-id tie-break
            }
        }
    }
    return field;
}

std::shared_ptr<const DistanceField> MetricSpace::distance_field(Vertex source) const {
    check_vertex(source);
    {
        std::lock_guard<std::mutex> lock(*cache_mu_);
        auto it = field_cache_.find(source);
        if (it != field_cache_.end()) return it->second;
    }
    auto field = std::make_shared<DistanceField>(dijkstra(source, nullptr));
    {
        std::lock_guard<std::mutex> lock(*cache_mu_);
        auto it = field_cache_.find(source);
        if (it != field_cache_.end()) return it->second;
        if (field_cache_.size() < cache_cap_) field_cache_.emplace(source, field);
    }
    return field;
}

Length MetricSpace::distance(Vertex a, Vertex b) const {
    check_vertex(a);
    check_vertex(b);
    if (a == b) return 0;
    return (*distance_field(a))[b];
}

Length MetricSpace::diameter() const {
    {
        std::lock_guard<std::mutex> lock(*cache_mu_);
        if (diameter_ >= 0) return diameter_;
    }
    Length best = 0;
    for (Vertex v = 0; v < n_; ++v) {
        const auto field = dijkstra(v, nullptr);
        for (Length d : field.value) best = std::max(best, d);
        if (n_ > 2000) {  // two sweeps bound it well enough for reporting
            Vertex far = 0;
            for (Vertex u = 0; u < n_; ++u)
                if (field.value[static_cast<std::size_t>(u)] >
                    field.value[static_cast<std::size_t>(far)])
                    far = u;
            const auto f2 = dijkstra(far, nullptr);
            for (Length d : f2.value) best = std::max(best, d);
            break;
        }
    }
    std::lock_guard<std::mutex> lock(*cache_mu_);
    diameter_ = best;
    return best;
}

DistanceField MetricSpace::multi_source_distance(const Mask& sources) const {
    DistanceField field;
    field.value.assign(static_cast<std::size_t>(n_), kInfLength);
    if (sources.universe() != n_ && !sources.empty())
        throw std::invalid_argument("source mask belongs to a different space");
    MinHeap heap;
    for (Vertex v = 0; v < n_; ++v) {
        if (!sources.empty() && sources.contains(v)) {
            field.value[static_cast<std::size_t>(v)] = 0;
            heap.push({0, v});
        }
    }
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > field.value[static_cast<std::size_t>(u)]) continue;
        for (const Arc& a : arcs(u)) {
            const Length nd = d + a.w;
            auto& slot = field.value[static_cast<std::size_t>(a.to)];
            if (nd < slot) {
                slot = nd;
                heap.push({nd, a.to});
            }
        }
    }
    return field;
}

std::vector<std::pair<Vertex, Length>> MetricSpace::explore(std::span<const Vertex> sources,
                                                            Length limit) const {
    auto& scratch = tls_scratch;
    scratch.prepare(n_);
    MinHeap heap;
    for (Vertex v : sources) {
        check_vertex(v);
        if (scratch.get(v) > 0) {
            scratch.set(v, 0);
            heap.push({0, v});
        }
    }
    std::vector<std::pair<Vertex, Length>> out;
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > scratch.get(u)) continue;  // stale key
        if (d > limit) break;
        out.emplace_back(u, d);
        for (const Arc& a : arcs(u)) {
            const Length nd = d + a.w;
            if (nd <= limit && nd < scratch.get(a.to)) {
                scratch.set(a.to, nd);
                heap.push({nd, a.to});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Vertex> MetricSpace::geodesic(Vertex a, Vertex b) const {
    check_vertex(a);
    check_vertex(b);
    if (a == b) return {a};
    std::vector<Vertex> pred;
    const DistanceField field = dijkstra(a, &pred);
    std::vector<Vertex> path;
    for (Vertex v = b; v != a; v = pred[static_cast<std::size_t>(v)]) path.push_back(v);
    path.push_back(a);
    std::reverse(path.begin(), path.end());
    return path;
}

Mask MetricSpace::ball(Vertex center, Length radius) const {
    check_vertex(center);
    if (radius < 0) throw std::invalid_argument("ball radius must be nonnegative");
    Mask m(n_);
    const Vertex src[1] = {center};
    for (const auto& [v, d] : explore(src, radius)) {
        (void)d;
        m.insert(v);
    }
    return m;
}

Mask MetricSpace::neighborhood(const Mask& set, Length radius) const {
    if (radius < 0) throw std::invalid_argument("neighborhood radius must be nonnegative");
    Mask m(n_);
    if (set.empty()) return m;
    const std::vector<Vertex> src = set.ids();
    for (const auto& [v, d] : explore(src, radius)) {
        (void)d;
        m.insert(v);
    }
    return m;
}

Mask MetricSpace::connected_component(const Mask& mask, Vertex seed) const {
    check_vertex(seed);
    if (!mask.contains(seed)) throw std::invalid_argument("seed not in mask");
    Mask comp(n_);
    comp.insert(seed);
    std::vector<Vertex> stack{seed};
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (const Arc& a : arcs(v)) {
            if (mask.contains(a.to) && !comp.contains(a.to)) {
                comp.insert(a.to);
                stack.push_back(a.to);
            }
        }
    }
    return comp;
}

// ============================================================================
// Doubling estimate: greedy set cover of each sampled ball by half-radius
// balls centered at its own points. Greedy count upper-bounds the minimum.
// ============================================================================

DoublingEstimate MetricSpace::estimate_doubling(std::span<const Length> scales,
                                                const SampleSpec& sample) const {
    if (scales.empty()) throw std::invalid_argument("at least one scale is required");
    for (Length r : scales)
        if (!(r > 0)) throw std::invalid_argument("scales must be positive");

    std::vector<Vertex> centers;
    if (sample.max_centers <= 0 || sample.max_centers >= n_) {
        centers.resize(static_cast<std::size_t>(n_));
        for (Vertex v = 0; v < n_; ++v) centers[static_cast<std::size_t>(v)] = v;
    } else {
        // Seeded Fisher-Yates prefix over the id range.
        std::vector<Vertex> all(static_cast<std::size_t>(n_));
        for (Vertex v = 0; v < n_; ++v) all[static_cast<std::size_t>(v)] = v;
        Rng rng(sample.seed);
        for (int i = 0; i < sample.max_centers; ++i) {
            const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_ - i)));
            std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
        }
        centers.assign(all.begin(), all.begin() + sample.max_centers);
        std::sort(centers.begin(), centers.end());
    }

    DoublingEstimate est;
    est.scales.assign(scales.begin(), scales.end());
    est.worst_per_scale.assign(scales.size(), 1);

    for (std::size_t si = 0; si < scales.size(); ++si) {
        const Length r = scales[si];
        int worst = 1;
        for (Vertex x : centers) {
            const Vertex src[1] = {x};
            const auto members = explore(src, r);
            if (members.size() <= 1) {
                worst = std::max(worst, 1);
                continue;
            }
            // index members for dense bookkeeping
            std::vector<Vertex> verts;
            verts.reserve(members.size());
            for (const auto& [v, d] : members) {
                (void)d;
                verts.push_back(v);
            }
            std::vector<std::vector<int>> covers(verts.size());
            for (std::size_t i = 0; i < verts.size(); ++i) {
                const Vertex y = verts[i];
                const Vertex ys[1] = {y};
                for (const auto& [v, d] : explore(ys, r / 2)) {
                    (void)d;
                    const auto it = std::lower_bound(verts.begin(), verts.end(), v);
                    if (it != verts.end() && *it == v)
                        covers[i].push_back(static_cast<int>(it - verts.begin()));
                }
            }
            std::vector<std::uint8_t> covered(verts.size(), 0);
            std::size_t remaining = verts.size();
            int used = 0;
            while (remaining > 0) {
                int best = -1;
                int best_gain = -1;
                for (std::size_t i = 0; i < verts.size(); ++i) {
                    int gain = 0;
                    for (int m : covers[i])
                        if (!covered[static_cast<std::size_t>(m)]) ++gain;
                    if (gain > best_gain) {  // ties resolve to the smallest id
                        best_gain = gain;
                        best = static_cast<int>(i);
                    }
                }
                if (best_gain <= 0) break;  // cannot happen: y covers itself
                for (int m : covers[static_cast<std::size_t>(best)]) {
                    if (!covered[static_cast<std::size_t>(m)]) {
                        covered[static_cast<std::size_t>(m)] = 1;
                        --remaining;
                    }
                }
                ++used;
            }
            worst = std::max(worst, used);
        }
        est.worst_per_scale[si] = worst;
        est.constant = std::max(est.constant, worst);
    }
    return est;
}

} // namespace uniformize
