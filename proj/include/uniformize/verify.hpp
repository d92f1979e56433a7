#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uniformize/approximate.hpp"
#include "uniformize/metric_space.hpp"

namespace uniformize {

// Vertex path with cumulative edge lengths; consecutive vertices adjacent.
struct Curve {
    std::vector<Vertex> vertices;
    std::vector<Length> prefix;     // prefix[i] = length of the first i hops

    static Curve single(Vertex v);
    static Curve from_vertices(const MetricSpace& space, std::vector<Vertex> vs);

    bool empty_motion() const { return vertices.size() <= 1; }
    Length length() const { return prefix.empty() ? 0 : prefix.back(); }
    int hops() const { return static_cast<int>(vertices.size()) - 1; }

    void append(const MetricSpace& space, const Curve& tail);  // tail starts at back()
    Curve reversed() const;
};

struct PairSamplingSpec {
    int target_pairs = 256;
    int exhaustive_threshold = 64;  // take all pairs when |domain| <= this
    int buckets = 8;                // log-spaced distance strata
    std::uint64_t seed = 1;
    double rel_tol = 1e-6;
};

struct PairUniformity {
    Vertex x = kNoVertex;
    Vertex y = kNoVertex;
    Length dist = 0;
    double cu = 1.0;
};

struct ClosenessResult {
    ApproxMode mode = ApproxMode::inner;
    Length epsilon = 0;
    bool containment_ok = true;     // inner: result within domain; outer: domain within result
    bool closeness_ok = true;       // one-sided Hausdorff bound at epsilon
    std::optional<Vertex> witness;
    bool pass() const { return containment_ok && closeness_ok; }
};

struct UniformityReport {
    int pairs = 0;
    double cu_max = 1.0;
    double cu_p95 = 1.0;
    double cu_median = 1.0;
    std::pair<Vertex, Vertex> worst_pair{kNoVertex, kNoVertex};
    Curve worst_curve;
    std::vector<PairUniformity> samples;
    std::optional<ClosenessResult> closeness;
    std::string mode;
    bool certified = false;
};

// One named inequality of a curve certificate. Required checks are hard
// guarantees of the construction; informational ones are measurements.
struct CertCheck {
    std::string name;
    double measured = 0;
    double bound = 0;
    bool required = false;
    bool ok = true;
};

struct CurveCertificate {
    std::string regime;     // identical | clearance_geodesic | multiscale_join | coarse_join
    int level_index = 0;    // n for the near regimes
    int k_x = 0;
    int k_y = 0;
    std::vector<CertCheck> checks;
    bool all_required_ok = true;
};

// Decides whether some vertex path from x to y inside the domain has total
// length <= C*d(x,y) and satisfies, at every vertex z, min(prefix, suffix)
// <= C * dist(z, complement). Exact for vertex paths.
std::optional<Curve> feasible_cigar_path(const MetricSpace& space, const Domain& domain,
                                         Vertex x, Vertex y, double C);

// Smallest feasible C for the pair, within rel_tol, by bisection.
double min_uniformity_constant_pair(const MetricSpace& space, const Domain& domain,
                                    Vertex x, Vertex y, double rel_tol = 1e-6);

// Exhaustive simple-path oracle; domain must induce at most max_vertices
// (default 12) vertices.
double brute_force_uniformity(const MetricSpace& space, const Domain& domain,
                              Vertex x, Vertex y, int max_vertices = 12);

UniformityReport empirical_uniformity(const MetricSpace& space, const Domain& domain,
                                      const PairSamplingSpec& sampling = {});

// Builds the joining curve the construction transcript promises for the
// pair, re-measuring every inequality the transcript guarantees. Throws if a
// required bound fails (that is a bug, not a report item).
std::pair<Curve, CurveCertificate> proof_curve(const MetricSpace& space,
                                               const ScaleTrace& trace,
                                               Vertex x, Vertex y);

ClosenessResult closeness_check(const MetricSpace& space, const Domain& domain,
                                const Domain& result, ApproxMode mode, Length epsilon);

} // namespace uniformize
