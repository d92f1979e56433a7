#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uniformize/approximate.hpp"
#include "uniformize/metric_space.hpp"

namespace uniformize {

enum class GridShape { square, disk, slit, spiral };

GridShape grid_shape_from_string(const std::string& name);

struct GeneratedDomain {
    MetricSpace space;
    Domain domain;
    int width = 0;
    int height = 0;
    std::vector<std::array<double, 2>> coords;
};

struct GeneratedSpace {
    MetricSpace space;
    std::vector<std::array<double, 2>> coords;
};

// Unit-spacing 4-neighbor grid with a connected shape mask whose complement
// is nonempty. Vertex ids are row-major: id = y*w + x.
GeneratedDomain grid_domain(int w, int h, GridShape shape, Length edge_weight = 1.0);

// Chain of square rooms joined by 1-vertex-wide corridors whose length grows
// with the room index; the raw domain is connected but its uniformity
// constant grows with `levels`. corridor_length(i) defaults to 4^(i+1).
GeneratedDomain rooms_and_passages(int levels, int room,
                                   const std::function<int(int)>& corridor_length = {},
                                   Length edge_weight = 1.0);

// Seeded points in the unit square, edges between pairs within `radius`
// weighted by Euclidean distance (quantized to multiples of 2^-20 so sums of
// weights are exact in double); largest connected component kept, reindexed.
GeneratedSpace random_geometric(int n, double radius, std::uint64_t seed);

} // namespace uniformize
