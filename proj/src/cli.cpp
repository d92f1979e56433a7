#include "uniformize/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "uniformize/corpus.hpp"
#include "uniformize/io.hpp"

namespace uniformize {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerifyFailed = 4;

struct GenerateOptions {
    std::string family;
    std::string out = ".";
    int width = 21, height = 21;
    std::string shape = "disk";
    int levels = 3, room = 9;
    int count = 500;
    double radius = 0.08;
    double edge_weight = 1.0;
    std::uint64_t seed = 1;
};

int cmd_generate(const GenerateOptions& opt) {
    MetricSpace space = MetricSpace::from_edges(1, {});
    std::vector<std::array<double, 2>> coords;
    Mask domain_mask;

    if (opt.family == "grid") {
        auto gen = grid_domain(opt.width, opt.height, grid_shape_from_string(opt.shape),
                               opt.edge_weight);
        space = std::move(gen.space);
        coords = std::move(gen.coords);
        domain_mask = gen.domain.mask();
    } else if (opt.family == "rooms") {
        auto gen = rooms_and_passages(opt.levels, opt.room, {}, opt.edge_weight);
        space = std::move(gen.space);
        coords = std::move(gen.coords);
        domain_mask = gen.domain.mask();
    } else if (opt.family == "rgg") {
        auto gen = random_geometric(opt.count, opt.radius, opt.seed);
        space = std::move(gen.space);
        coords = std::move(gen.coords);
        // Domain: a geodesic ball around the most central point, shrunk
        // until the complement is nonempty.
        Vertex center = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < coords.size(); ++v) {
            const double dx = coords[v][0] - 0.5, dy = coords[v][1] - 0.5;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best) {
                best = d2;
                center = static_cast<Vertex>(v);
            }
        }
        Length radius = 0.35 * space.diameter();
        domain_mask = space.ball(center, radius);
        while (domain_mask.size() == space.size() && radius > 0) {
            radius /= 2;
            domain_mask = space.ball(center, radius);
        }
        if (domain_mask.size() == space.size())
            throw std::invalid_argument("space too small to carve a proper domain");
    } else {
        throw CLI::ValidationError("--family", "unknown family: " + opt.family);
    }

    const fs::path out(opt.out);
    write_json_file(out / "space.json", space_to_json(space, coords));
    write_json_file(out / "domain.json", mask_to_json(domain_mask));
    return kExitOk;
}

struct ApproximateOptions {
    std::string space_path, domain_path;
    std::string mode = "both";
    double epsilon = 1.0;
    std::string delta_mode = "practical";
    double delta = 0.25;
    std::optional<double> tau;
    std::optional<Vertex> base_point;
    int max_levels = 64;
    std::string out = ".";
};

ApproxConfig build_config(const ApproximateOptions& opt, ApproxMode mode) {
    ApproxConfig config;
    config.mode = mode;
    config.epsilon = opt.epsilon;
    config.delta_mode =
        opt.delta_mode == "faithful" ? DeltaMode::faithful : DeltaMode::practical;
    config.delta = opt.delta;
    if (opt.tau) config.tau = *opt.tau;
    if (opt.base_point) config.base_point = *opt.base_point;
    config.max_levels = opt.max_levels;
    return config;
}

int cmd_approximate(const ApproximateOptions& opt) {
    SpaceFile sf = space_from_json(read_json_file(opt.space_path));
    Mask mask = mask_from_json(read_json_file(opt.domain_path));
    if (mask.universe() != sf.space.size()) {
        std::cerr << "error: domain file does not match the space file\n";
        return kExitUsage;
    }
    const Domain domain = Domain::create(sf.space, std::move(mask));

    const bool run_inner = opt.mode == "inner" || opt.mode == "both";
    const bool run_outer = opt.mode == "outer" || opt.mode == "both";
    if (!run_inner && !run_outer) {
        std::cerr << "error: --mode must be inner, outer or both\n";
        return kExitUsage;
    }

    const fs::path out(opt.out);
    Json traces;
    try {
        if (run_inner) {
            const ScaleTrace trace =
                approximate(sf.space, domain, build_config(opt, ApproxMode::inner));
            traces["inner"] = trace_to_json(trace);
            write_json_file(out / "omega_inner.json", mask_to_json(trace.result.mask()));
        }
        if (run_outer) {
            const ScaleTrace trace =
                approximate(sf.space, domain, build_config(opt, ApproxMode::outer));
            traces["outer"] = trace_to_json(trace);
            write_json_file(out / "omega_outer.json", mask_to_json(trace.result.mask()));
        }
    } catch (const std::invalid_argument& err) {
        std::cerr << "construction infeasible: " << err.what() << "\n";
        return kExitInfeasible;
    }
    write_json_file(out / "trace.json", traces);
    return kExitOk;
}

struct VerifyOptions {
    std::string space_path, domain_path;
    std::string mode = "inner";
    double epsilon = 1.0;
    int pairs = 256;
    int certificates = 100;
    std::uint64_t seed = 1;
    std::string out = ".";
};

int cmd_verify(const VerifyOptions& opt) {
    SpaceFile sf = space_from_json(read_json_file(opt.space_path));
    Mask mask = mask_from_json(read_json_file(opt.domain_path));
    if (mask.universe() != sf.space.size()) {
        std::cerr << "error: domain file does not match the space file\n";
        return kExitUsage;
    }
    const Domain domain = Domain::create(sf.space, std::move(mask));
    const ApproxMode mode = opt.mode == "outer" ? ApproxMode::outer : ApproxMode::inner;

    const fs::path out(opt.out);
    const fs::path result_path =
        out / (mode == ApproxMode::inner ? "omega_inner.json" : "omega_outer.json");
    Mask result_mask = mask_from_json(read_json_file(result_path));
    if (result_mask.universe() != sf.space.size()) {
        std::cerr << "error: result mask does not match the space file\n";
        return kExitUsage;
    }
    const Domain result = Domain::create(sf.space, std::move(result_mask));

    PairSamplingSpec sampling;
    sampling.target_pairs = opt.pairs;
    sampling.seed = opt.seed;

    UniformityReport report = empirical_uniformity(sf.space, result, sampling);
    report.closeness = closeness_check(sf.space, domain, result, mode, opt.epsilon);
    report.mode = opt.mode;

    // Certificates, when a faithful transcript is available.
    bool cert_failed = false;
    const fs::path trace_path = out / "trace.json";
    if (fs::exists(trace_path)) {
        const Json tj = read_json_file(trace_path);
        const char* key = mode == ApproxMode::inner ? "inner" : "outer";
        if (tj.contains(key) &&
            tj[key]["config"]["delta_mode"].get<std::string>() == "faithful") {
            const ScaleTrace trace = trace_from_json(sf.space, domain, tj[key]);
            report.mode += "/faithful";
            int checked = 0;
            try {
                for (const auto& s : report.samples) {
                    if (checked >= opt.certificates) break;
                    proof_curve(sf.space, trace, s.x, s.y);
                    ++checked;
                }
                report.certified = checked > 0;
            } catch (const std::logic_error& err) {
                std::cerr << "certificate failure: " << err.what() << "\n";
                cert_failed = true;
            }
        } else if (tj.contains(key)) {
            report.mode += "/practical";
        }
    }

    write_json_file(out / "report.json", report_to_json(report));
    if (!sf.coords.empty()) {
        write_mask_raster(out / ("mask_" + opt.mode + ".pgm"), sf.coords, domain.mask(),
                          result.mask());
    }

    if (cert_failed || !report.closeness->pass()) return kExitVerifyFailed;
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"inner/outer approximation of graph domains by uniform domains"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* cgen = app.add_subcommand("generate", "emit a corpus space and domain");
    cgen->add_option("--family", gen.family, "grid | rooms | rgg")->required();
    cgen->add_option("--width", gen.width);
    cgen->add_option("--height", gen.height);
    cgen->add_option("--shape", gen.shape, "square | disk | slit | spiral");
    cgen->add_option("--levels", gen.levels);
    cgen->add_option("--room", gen.room);
    cgen->add_option("--count", gen.count);
    cgen->add_option("--radius", gen.radius);
    cgen->add_option("--edge-weight", gen.edge_weight);
    cgen->add_option("--seed", gen.seed);
    cgen->add_option("--out", gen.out);

    ApproximateOptions apx;
    auto* capx = app.add_subcommand("approximate", "run the multi-scale construction");
    capx->add_option("--space", apx.space_path)->required();
    capx->add_option("--domain", apx.domain_path)->required();
    capx->add_option("--mode", apx.mode, "inner | outer | both");
    capx->add_option("--epsilon", apx.epsilon)->check(CLI::PositiveNumber);
    capx->add_option("--delta-mode", apx.delta_mode, "faithful | practical");
    capx->add_option("--delta", apx.delta);
    double tau_val = 0;
    auto* tau_opt = capx->add_option("--tau", tau_val);
    Vertex x0_val = 0;
    auto* x0_opt = capx->add_option("--x0", x0_val);
    capx->add_option("--max-levels", apx.max_levels);
    std::uint64_t apx_seed = 1;
    capx->add_option("--seed", apx_seed);
    capx->add_option("--out", apx.out);

    VerifyOptions ver;
    auto* cver = app.add_subcommand("verify", "check closeness and measure uniformity");
    cver->add_option("--space", ver.space_path)->required();
    cver->add_option("--domain", ver.domain_path)->required();
    cver->add_option("--mode", ver.mode, "inner | outer");
    cver->add_option("--epsilon", ver.epsilon)->check(CLI::PositiveNumber);
    cver->add_option("--pairs", ver.pairs);
    cver->add_option("--certificates", ver.certificates);
    cver->add_option("--seed", ver.seed);
    cver->add_option("--out", ver.out);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cgen->parsed()) return cmd_generate(gen);
        if (capx->parsed()) {
            if (*tau_opt) apx.tau = tau_val;
            if (*x0_opt) apx.base_point = x0_val;
            return cmd_approximate(apx);
        }
        if (cver->parsed()) return cmd_verify(ver);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}

} // namespace uniformize
