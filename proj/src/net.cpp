#include "uniformize/net.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace uniformize {

std::string NetReport::summary() const {
    std::ostringstream os;
    if (pass()) {
        os << "net ok";
        if (ambiguous_pairs > 0) os << " (" << ambiguous_pairs << " gap values at tolerance)";
        return os.str();
    }
    if (!separation_ok)
        os << "separation violated by centers " << separation_pair->first << ","
           << separation_pair->second << "; ";
    if (!radius_range_ok) os << "radius " << *radius_index << " outside [r,2r]; ";
    if (!coverage_ok) os << "vertex " << *uncovered_vertex << " uncovered; ";
    if (!gap_ok)
        os << "gap " << gap_value << " inside (0,c*r) for centers " << gap_pair->first << ","
           << gap_pair->second << "; ";
    return os.str();
}

std::vector<Vertex> maximal_separated_net(const MetricSpace& space, Length r) {
    if (!(r > 0)) throw std::invalid_argument("net scale must be positive");
    const int n = space.size();
    std::vector<Length> to_center(static_cast<std::size_t>(n), kInfLength);
    std::vector<Vertex> centers;
    for (Vertex v = 0; v < n; ++v) {
        if (to_center[static_cast<std::size_t>(v)] < r) continue;
        centers.push_back(v);
        const Vertex src[1] = {v};
        for (const auto& [u, d] : space.explore(src, r)) {
            auto& slot = to_center[static_cast<std::size_t>(u)];
            slot = std::min(slot, d);
        }
    }
    return centers;
}

namespace {

struct CenterNeighbor {
    int index;   // index into centers
    Length dist;
};

// For each center, every other center within `limit`, ascending by index.
std::vector<std::vector<CenterNeighbor>> center_neighbors(const MetricSpace& space,
                                                          const std::vector<Vertex>& centers,
                                                          Length limit) {
    std::vector<int> index_of(static_cast<std::size_t>(space.size()), -1);
    for (std::size_t i = 0; i < centers.size(); ++i)
        index_of[static_cast<std::size_t>(centers[i])] = static_cast<int>(i);

    std::vector<std::vector<CenterNeighbor>> out(centers.size());
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const Vertex src[1] = {centers[j]};
        for (const auto& [v, d] : space.explore(src, limit)) {
            const int i = index_of[static_cast<std::size_t>(v)];
            if (i >= 0 && i != static_cast<int>(j)) out[j].push_back({i, d});
        }
        std::sort(out[j].begin(), out[j].end(),
                  [](const CenterNeighbor& a, const CenterNeighbor& b) {
                      return a.index < b.index;
                  });
    }
    return out;
}

} // namespace

Net assign_radii(const MetricSpace& space, const std::vector<Vertex>& centers, Length r) {
    if (!(r > 0)) throw std::invalid_argument("net scale must be positive");
    if (centers.empty()) throw std::invalid_argument("no centers");

    // Everything that can interact with the radius selection sits within 5r:
    // farther pairs have d - r_i - r/N > 2r, past every candidate radius.
    const auto neighbors = center_neighbors(space, centers, 5 * r);

    int max_close = 0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        int close = 0;
        for (const auto& nb : neighbors[j]) {
            if (nb.dist < r)
                throw std::invalid_argument("centers are not r-separated");
            if (nb.dist <= 4 * r) ++close;
        }
        max_close = std::max(max_close, close);
    }
    const int big_n = std::max(1, max_close);
    const Length gap = r / static_cast<Length>(big_n);

    Net net;
    net.r = r;
    net.neighbor_bound = big_n;
    net.c = 1.0 / static_cast<Length>(big_n);
    net.centers = centers;
    net.radii.resize(centers.size());
    net.radii[0] = r;

    std::vector<std::pair<Length, Length>> forbidden;
    for (std::size_t k = 1; k < centers.size(); ++k) {
        forbidden.clear();
        for (const auto& nb : neighbors[k]) {
            if (nb.index >= static_cast<int>(k)) continue;
            const Length hi = nb.dist - net.radii[static_cast<std::size_t>(nb.index)];
            const Length lo = hi - gap;
            if (hi > r && lo < 2 * r) forbidden.emplace_back(lo, hi);
        }
        if (static_cast<int>(forbidden.size()) > big_n)
            throw std::logic_error("radius selection: more blocking intervals than the "
                                   "neighbor bound admits");
        std::sort(forbidden.begin(), forbidden.end());

        // Smallest value in [r,2r] outside every open interval; interval
        // endpoints themselves are allowed.
        Length cand = r;
        for (const auto& [lo, hi] : forbidden)
            if (cand > lo && cand < hi) cand = hi;
        if (cand > 2 * r)
            throw std::logic_error("radius selection: no allowed radius in [r,2r]");
        net.radii[k] = cand;

        const Length margin = net_gap_tolerance(r);
        for (const auto& nb : neighbors[k]) {
            if (nb.index >= static_cast<int>(k)) continue;
            const Length g =
                nb.dist - net.radii[static_cast<std::size_t>(nb.index)] - net.radii[k];
            if (g > margin && g < net.c * r - margin)
                throw std::logic_error("radius selection produced a gap inside (0,c*r)");
        }
    }
    return net;
}

NetReport verify_net(const MetricSpace& space, const Net& net) {
    NetReport report;
    const Length r = net.r;
    const int m = net.size();
    if (m == 0 || static_cast<int>(net.radii.size()) != m) {
        report.radius_range_ok = false;
        report.radius_index = 0;
        return report;
    }

    for (int i = 0; i < m; ++i) {
        if (!(net.radii[static_cast<std::size_t>(i)] >= r &&
              net.radii[static_cast<std::size_t>(i)] <= 2 * r)) {
            report.radius_range_ok = false;
            report.radius_index = i;
            break;
        }
    }

    // Pairwise checks via truncated searches. Past the probe limit,
    // d - r_i - r_j > max(r, c*r), outside the forbidden interval for any c,
    // and separation cannot fail either.
    const Length probe = 4 * r + std::max(r, net.c * r);
    const auto neighbors = center_neighbors(space, net.centers, probe);
    const Length tol = net_gap_tolerance(r);
    for (int j = 0; j < m; ++j) {
        for (const auto& nb : neighbors[static_cast<std::size_t>(j)]) {
            if (nb.index <= j) continue;  // each unordered pair once
            if (report.separation_ok && nb.dist < r) {
                report.separation_ok = false;
                report.separation_pair = {j, nb.index};
            }
            const Length g = nb.dist - net.radii[static_cast<std::size_t>(j)] -
                             net.radii[static_cast<std::size_t>(nb.index)];
            if (report.gap_ok && g > tol && g < net.c * r - tol) {
                report.gap_ok = false;
                report.gap_pair = {j, nb.index};
                report.gap_value = g;
            }
            if (std::abs(g) <= tol || std::abs(g - net.c * r) <= tol)
                ++report.ambiguous_pairs;
        }
    }

    Mask covered(space.size());
    for (int i = 0; i < m; ++i) {
        const Vertex src[1] = {net.centers[static_cast<std::size_t>(i)]};
        for (const auto& [v, d] : space.explore(src, net.radii[static_cast<std::size_t>(i)])) {
            (void)d;
            covered.insert(v);
        }
    }
    if (covered.size() != space.size()) {
        report.coverage_ok = false;
        for (Vertex v = 0; v < space.size(); ++v) {
            if (!covered.contains(v)) {
                report.uncovered_vertex = v;
                break;
            }
        }
    }
    return report;
}

} // namespace uniformize
