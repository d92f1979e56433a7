#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uniformize/approximate.hpp"
#include "uniformize/metric_space.hpp"
#include "uniformize/net.hpp"
#include "uniformize/verify.hpp"

namespace uniformize {

using Json = nlohmann::ordered_json;

struct SpaceFile {
    MetricSpace space;
    std::vector<std::array<double, 2>> coords;  // empty when absent
};

Json space_to_json(const MetricSpace& space,
                   const std::vector<std::array<double, 2>>& coords);
SpaceFile space_from_json(const Json& j);

Json mask_to_json(const Mask& mask);
Mask mask_from_json(const Json& j);

Json net_to_json(const Net& net);
Net net_from_json(const Json& j);

Json trace_to_json(const ScaleTrace& trace);

// Rebuilds the full transcript (including the per-level sets, which the file
// stores only as sizes) from the serialized nets and the domain file.
ScaleTrace trace_from_json(const MetricSpace& space, const Domain& domain, const Json& j);

Json closeness_to_json(const ClosenessResult& c);
Json report_to_json(const UniformityReport& report);

std::string read_text_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory plus rename.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);
void write_json_file(const std::filesystem::path& path, const Json& j);

// Binary 8-bit PGM, row-major.
void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& pixels);

// Raster for grid spaces (integer coords): complement 0, domain 128,
// result 255. Returns false when the coords do not form an integer grid.
bool write_mask_raster(const std::filesystem::path& path,
                       const std::vector<std::array<double, 2>>& coords,
                       const Mask& domain, const Mask& result);

} // namespace uniformize
