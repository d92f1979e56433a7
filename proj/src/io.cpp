#include "uniformize/io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace uniformize {

// ============================================================================
// JSON codecs
// ============================================================================

Json space_to_json(const MetricSpace& space,
                   const std::vector<std::array<double, 2>>& coords) {
    Json j;
    j["n"] = space.size();
    Json earr = Json::array();
    for (const auto& e : space.edge_list()) earr.push_back(Json::array({e.u, e.v, e.w}));
    j["edges"] = std::move(earr);
    if (!coords.empty()) {
        Json carr = Json::array();
        for (const auto& c : coords) carr.push_back(Json::array({c[0], c[1]}));
        j["coords"] = std::move(carr);
    }
    return j;
}

SpaceFile space_from_json(const Json& j) {
    if (!j.contains("n") || !j.contains("edges"))
        throw std::invalid_argument("space file needs \"n\" and \"edges\"");
    const int n = j.at("n").get<int>();
    std::vector<SpaceEdge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3)
            throw std::invalid_argument("each edge must be [u, v, w]");
        edges.push_back({e[0].get<Vertex>(), e[1].get<Vertex>(), e[2].get<Length>()});
    }
    SpaceFile out{MetricSpace::from_edges(n, edges), {}};
    if (j.contains("coords")) {
        for (const auto& c : j.at("coords"))
            out.coords.push_back({c[0].get<double>(), c[1].get<double>()});
        if (static_cast<int>(out.coords.size()) != n)
            throw std::invalid_argument("coords must list one point per vertex");
    }
    return out;
}

Json mask_to_json(const Mask& mask) {
    Json j;
    j["n"] = mask.universe();
    j["mask"] = mask.ids();
    return j;
}

Mask mask_from_json(const Json& j) {
    if (!j.contains("n") || !j.contains("mask"))
        throw std::invalid_argument("domain file needs \"n\" and \"mask\"");
    Mask m(j.at("n").get<int>());
    for (const auto& v : j.at("mask")) m.insert(v.get<Vertex>());
    return m;
}

Json net_to_json(const Net& net) {
    Json j;
    j["r"] = net.r;
    j["c"] = net.c;
    j["N"] = net.neighbor_bound;
    j["centers"] = net.centers;
    j["radii"] = net.radii;
    return j;
}

Net net_from_json(const Json& j) {
    Net net;
    net.r = j.at("r").get<Length>();
    net.c = j.at("c").get<Length>();
    net.neighbor_bound = j.at("N").get<int>();
    net.centers = j.at("centers").get<std::vector<Vertex>>();
    net.radii = j.at("radii").get<std::vector<Length>>();
    if (net.centers.size() != net.radii.size())
        throw std::invalid_argument("net centers and radii disagree in length");
    return net;
}

namespace {

const char* mode_name(ApproxMode m) { return m == ApproxMode::inner ? "inner" : "outer"; }
const char* delta_mode_name(DeltaMode m) {
    return m == DeltaMode::faithful ? "faithful" : "practical";
}

} // namespace

Json trace_to_json(const ScaleTrace& trace) {
    Json j;
    Json cfg;
    cfg["mode"] = mode_name(trace.mode);
    cfg["delta_mode"] = delta_mode_name(trace.delta_mode);
    cfg["epsilon"] = trace.epsilon;
    cfg["tau"] = trace.tau;
    cfg["delta"] = trace.delta;
    cfg["c"] = trace.gap_constant;
    cfg["x0"] = trace.base_point;
    cfg["max_levels"] = trace.max_levels;
    j["config"] = std::move(cfg);
    j["initial_mask_size"] = trace.initial.size();
    Json levels = Json::array();
    for (const auto& lvl : trace.levels) {
        Json l;
        l["k"] = lvl.level;
        l["scale"] = lvl.scale;
        l["net"] = net_to_json(lvl.net);
        l["selected"] = lvl.selected;
        l["mask_size"] = lvl.set.size();
        levels.push_back(std::move(l));
    }
    j["levels"] = std::move(levels);
    j["reached_fixpoint"] = trace.reached_fixpoint;
    j["final_mask"] = trace.result.mask().ids();
    return j;
}

ScaleTrace trace_from_json(const MetricSpace& space, const Domain& domain, const Json& j) {
    ScaleTrace trace;
    const auto& cfg = j.at("config");
    trace.mode = cfg.at("mode").get<std::string>() == "inner" ? ApproxMode::inner
                                                              : ApproxMode::outer;
    trace.delta_mode = cfg.at("delta_mode").get<std::string>() == "faithful"
                           ? DeltaMode::faithful
                           : DeltaMode::practical;
    trace.epsilon = cfg.at("epsilon").get<Length>();
    trace.tau = cfg.at("tau").get<Length>();
    trace.delta = cfg.at("delta").get<Length>();
    trace.gap_constant = cfg.at("c").get<Length>();
    trace.base_point = cfg.at("x0").get<Vertex>();
    trace.max_levels = cfg.at("max_levels").get<int>();
    trace.reached_fixpoint = j.at("reached_fixpoint").get<bool>();

    // The file stores per-level sets as sizes only; rebuild them from the
    // serialized nets and the construction rule.
    Domain initial = trace.mode == ApproxMode::inner
                         ? initial_set_inner(space, domain, trace.tau, trace.base_point)
                         : initial_set_outer(domain);
    trace.initial = initial.mask();
    if (j.at("initial_mask_size").get<int>() != trace.initial.size())
        throw std::invalid_argument("transcript does not match the domain file");

    Mask current = trace.initial;
    for (const auto& l : j.at("levels")) {
        TraceLevel lvl;
        lvl.level = l.at("k").get<int>();
        lvl.scale = l.at("scale").get<Length>();
        lvl.net = net_from_json(l.at("net"));
        lvl.selected = l.at("selected").get<std::vector<int>>();
        Mask next(space.size());
        for (int i : lvl.selected) {
            if (i < 0 || i >= lvl.net.size())
                throw std::invalid_argument("selected ball index out of range");
            const Vertex src[1] = {lvl.net.centers[static_cast<std::size_t>(i)]};
            for (const auto& [v, d] :
                 space.explore(src, lvl.net.radii[static_cast<std::size_t>(i)])) {
                (void)d;
                next.insert(v);
            }
        }
        if (l.at("mask_size").get<int>() != next.size())
            throw std::invalid_argument("transcript level set does not reproduce");
        if (!current.is_subset_of(next))
            throw std::invalid_argument("transcript levels are not monotone");
        current = next;
        lvl.set = std::move(next);
        trace.levels.push_back(std::move(lvl));
    }
    trace.result = Domain::create(space, current);

    const auto final_ids = j.at("final_mask").get<std::vector<Vertex>>();
    if (Mask::of(space.size(), final_ids) != trace.result.mask())
        throw std::invalid_argument("transcript final mask does not reproduce");
    return trace;
}

Json closeness_to_json(const ClosenessResult& c) {
    Json j;
    j["mode"] = mode_name(c.mode);
    j["epsilon"] = c.epsilon;
    j["containment_ok"] = c.containment_ok;
    j["closeness_ok"] = c.closeness_ok;
    j["pass"] = c.pass();
    if (c.witness) j["witness"] = *c.witness;
    return j;
}

Json report_to_json(const UniformityReport& report) {
    Json j;
    j["pairs"] = report.pairs;
    j["cu_max"] = report.cu_max;
    j["cu_p95"] = report.cu_p95;
    j["cu_median"] = report.cu_median;
    j["worst_pair"] = Json::array({report.worst_pair.first, report.worst_pair.second});
    j["closeness"] = report.closeness ? closeness_to_json(*report.closeness) : Json(nullptr);
    j["mode"] = report.mode;
    j["certified"] = report.certified;
    j["worst_curve_length"] = report.worst_curve.length();
    return j;
}

// ============================================================================
// Files
// ============================================================================

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Json read_json_file(const std::filesystem::path& path) {
    return Json::parse(read_text_file(path));
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    const auto dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    atomic_write_file(path, j.dump(2) + "\n");
}

void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& pixels) {
    if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != pixels.size())
        throw std::invalid_argument("pixel buffer does not match dimensions");
    std::string blob = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    blob.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    atomic_write_file(path, blob);
}

bool write_mask_raster(const std::filesystem::path& path,
                       const std::vector<std::array<double, 2>>& coords, const Mask& domain,
                       const Mask& result) {
    if (coords.empty()) return false;
    int width = 0, height = 0;
    for (const auto& c : coords) {
        for (double v : {c[0], c[1]})
            if (v < 0 || v != std::floor(v) || v > 1e6) return false;
        width = std::max(width, static_cast<int>(c[0]) + 1);
        height = std::max(height, static_cast<int>(c[1]) + 1);
    }
    if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != coords.size())
        return false;  // not a full grid
    std::vector<std::uint8_t> pixels(coords.size(), 0);
    for (std::size_t v = 0; v < coords.size(); ++v) {
        const auto idx = static_cast<std::size_t>(coords[v][1]) * static_cast<std::size_t>(width) +
                         static_cast<std::size_t>(coords[v][0]);
        const auto vid = static_cast<Vertex>(v);
        pixels[idx] = result.contains(vid) ? 255 : (domain.contains(vid) ? 128 : 0);
    }
    write_pgm(path, width, height, pixels);
    return true;
}

} // namespace uniformize
