#include "uniformize/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uniformize/rng.hpp"

namespace uniformize {

GridShape grid_shape_from_string(const std::string& name) {
    if (name == "square") return GridShape::square;
    if (name == "disk") return GridShape::disk;
    if (name == "slit") return GridShape::slit;
    if (name == "spiral") return GridShape::spiral;
    throw std::invalid_argument("unknown grid shape: " + name);
}

namespace {

struct GridBuilder {
    int w, h;
    Length weight;

    Vertex id(int x, int y) const { return y * w + x; }

    MetricSpace space() const {
        std::vector<SpaceEdge> edges;
        edges.reserve(static_cast<std::size_t>(2 * w * h));
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (x + 1 < w) edges.push_back({id(x, y), id(x + 1, y), weight});
                if (y + 1 < h) edges.push_back({id(x, y), id(x, y + 1), weight});
            }
        }
        return MetricSpace::from_edges(w * h, edges);
    }

    std::vector<std::array<double, 2>> coords() const {
        std::vector<std::array<double, 2>> out;
        out.reserve(static_cast<std::size_t>(w * h));
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out.push_back({static_cast<double>(x), static_cast<double>(y)});
        return out;
    }
};

Mask shape_mask(const GridBuilder& g, GridShape shape) {
    Mask m(g.w * g.h);
    switch (shape) {
        case GridShape::square: {
            for (int y = 1; y + 1 < g.h; ++y)
                for (int x = 1; x + 1 < g.w; ++x) m.insert(g.id(x, y));
            break;
        }
        case GridShape::disk: {
            const double cx = (g.w - 1) / 2.0;
            const double cy = (g.h - 1) / 2.0;
            const double radius = std::floor(std::min(g.w, g.h) / 2.0) - 2.0;
            if (radius < 1) throw std::invalid_argument("grid too small for a disk");
            for (int y = 0; y < g.h; ++y)
                for (int x = 0; x < g.w; ++x)
                    if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius)
                        m.insert(g.id(x, y));
            break;
        }
        case GridShape::slit: {
            const int cx = g.w / 2;
            const int cy = g.h / 2;
            for (int y = 1; y + 1 < g.h; ++y)
                for (int x = 1; x + 1 < g.w; ++x)
                    if (!(x == cx && y <= cy)) m.insert(g.id(x, y));
            break;
        }
        case GridShape::spiral: {
            // One-vertex-wide corridor walked along shrinking rectangles.
            int l = 1, r = g.w - 2, t = 1, b = g.h - 2;
            int x = l, y = t;
            m.insert(g.id(x, y));
            auto walk = [&](int dx, int dy, int tx, int ty) {
                while (x != tx || y != ty) {
                    x += dx;
                    y += dy;
                    m.insert(g.id(x, y));
                }
            };
            while (l <= r && t <= b) {
                walk(1, 0, r, y);
                if (t + 2 > b) break;
                walk(0, 1, x, b);
                walk(-1, 0, l, y);
                if (t + 4 > b) break;
                walk(0, -1, x, t + 2);
                l += 2;
                r -= 2;
                t += 2;
                b -= 2;
                if (l > r || t > b) break;
                walk(1, 0, l, y);  // step into the next ring start column
            }
            break;
        }
    }
    return m;
}

} // namespace

GeneratedDomain grid_domain(int w, int h, GridShape shape, Length edge_weight) {
    if (w < 3 || h < 3) throw std::invalid_argument("grid needs w, h >= 3");
    if (shape == GridShape::spiral && (w < 7 || h < 7))
        throw std::invalid_argument("spiral needs w, h >= 7");
    if (!(edge_weight > 0)) throw std::invalid_argument("edge weight must be positive");

    const GridBuilder g{w, h, edge_weight};
    GeneratedDomain out{g.space(), Domain(), w, h, g.coords()};
    Mask m = shape_mask(g, shape);
    if (m.empty()) throw std::invalid_argument("shape mask is empty for this size");
    if (m.size() == w * h) throw std::invalid_argument("shape mask has empty complement");
    out.domain = Domain::create(out.space, std::move(m));  // throws when disconnected
    return out;
}

GeneratedDomain rooms_and_passages(int levels, int room,
                                   const std::function<int(int)>& corridor_length,
                                   Length edge_weight) {
    if (levels < 1) throw std::invalid_argument("need at least one room");
    if (room < 3 || room % 2 == 0)
        throw std::invalid_argument("room side must be odd and at least 3");
    std::function<int(int)> corridor = corridor_length;
    if (!corridor)
        corridor = [](int i) {
            int len = 4;
            for (int j = 0; j < i; ++j) len *= 4;
            return len;  // 4^(i+1)
        };

    // Layout on a bounding grid: rooms side by side on a common centerline,
    // one empty row/column of separation all around.
    int total_w = 1;
    std::vector<int> room_x(static_cast<std::size_t>(levels));
    std::vector<int> corridor_len(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) {
        room_x[static_cast<std::size_t>(i)] = total_w;
        total_w += room;
        if (i + 1 < levels) {
            corridor_len[static_cast<std::size_t>(i)] = corridor(i);
            if (corridor_len[static_cast<std::size_t>(i)] < 1)
                throw std::invalid_argument("corridor length must be positive");
            total_w += corridor_len[static_cast<std::size_t>(i)];
        }
    }
    total_w += 1;
    const int total_h = room + 2;
    const int cy = total_h / 2;

    const GridBuilder g{total_w, total_h, edge_weight};
    Mask m(total_w * total_h);
    for (int i = 0; i < levels; ++i) {
        const int x0 = room_x[static_cast<std::size_t>(i)];
        for (int y = 1; y <= room; ++y)
            for (int x = x0; x < x0 + room; ++x) m.insert(g.id(x, y));
        if (i + 1 < levels) {
            const int cx0 = x0 + room;
            for (int x = cx0; x < cx0 + corridor_len[static_cast<std::size_t>(i)]; ++x)
                m.insert(g.id(x, cy));
        }
    }

    GeneratedDomain out{g.space(), Domain(), total_w, total_h, g.coords()};
    out.domain = Domain::create(out.space, std::move(m));
    return out;
}

GeneratedSpace random_geometric(int n, double radius, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("need at least one point");
    if (!(radius > 0)) throw std::invalid_argument("radius must be positive");

    Rng rng(seed);
    std::vector<std::array<double, 2>> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
        p[0] = rng.unit();
        p[1] = rng.unit();
    }

    // Euclidean weights quantized to multiples of 2^-20: sums of edge weights
    // stay exact in double, which keeps interval arithmetic downstream exact.
    const double quantum = 0x1.0p-20;
    std::vector<SpaceEdge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = pts[static_cast<std::size_t>(i)][0] - pts[static_cast<std::size_t>(j)][0];
            const double dy = pts[static_cast<std::size_t>(i)][1] - pts[static_cast<std::size_t>(j)][1];
            const double dist = std::sqrt(dx * dx + dy * dy);
            if (dist <= radius) {
                const double w = std::max(quantum, std::round(dist / quantum) * quantum);
                edges.push_back({i, j, w});
            }
        }
    }

    // Largest connected component, by size then smallest contained id.
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& e : edges) {
        adj[static_cast<std::size_t>(e.u)].push_back(e.v);
        adj[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    int ncomp = 0;
    std::vector<int> comp_size;
    for (int s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        int size = 0;
        std::vector<int> stack{s};
        comp[static_cast<std::size_t>(s)] = ncomp;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            ++size;
            for (int u : adj[static_cast<std::size_t>(v)]) {
                if (comp[static_cast<std::size_t>(u)] < 0) {
                    comp[static_cast<std::size_t>(u)] = ncomp;
                    stack.push_back(u);
                }
            }
        }
        comp_size.push_back(size);
        ++ncomp;
    }
    int keep = 0;
    for (int c = 1; c < ncomp; ++c)
        if (comp_size[static_cast<std::size_t>(c)] > comp_size[static_cast<std::size_t>(keep)])
            keep = c;

    std::vector<Vertex> remap(static_cast<std::size_t>(n), kNoVertex);
    std::vector<std::array<double, 2>> kept_coords;
    int kept = 0;
    for (int v = 0; v < n; ++v) {
        if (comp[static_cast<std::size_t>(v)] == keep) {
            remap[static_cast<std::size_t>(v)] = kept++;
            kept_coords.push_back(pts[static_cast<std::size_t>(v)]);
        }
    }
    std::vector<SpaceEdge> kept_edges;
    for (const auto& e : edges) {
        if (remap[static_cast<std::size_t>(e.u)] != kNoVertex &&
            remap[static_cast<std::size_t>(e.v)] != kNoVertex)
            kept_edges.push_back({remap[static_cast<std::size_t>(e.u)],
                                  remap[static_cast<std::size_t>(e.v)], e.w});
    }
    return GeneratedSpace{MetricSpace::from_edges(kept, kept_edges), std::move(kept_coords)};
}

} // namespace uniformize
