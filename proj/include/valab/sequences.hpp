#pragma once

#include <functional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "valab/hausdorff.hpp"
#include "valab/polytope.hpp"

namespace valab {

using LimitBody = std::variant<Polytope, Ball>;

/// Lazily generated family of polytopes P_m converging in the Hausdorff metric to `limit`.
class PolytopeSequence {
public:
    PolytopeSequence(std::string family, nlohmann::json params, std::function<Polytope(int)> generator,
                     LimitBody limit)
        : family_(std::move(family)), params_(std::move(params)), generator_(std::move(generator)),
          limit_(std::move(limit)) {}

    const std::string& family() const { return family_; }
    const nlohmann::json& params() const { return params_; }
    const LimitBody& limit() const { return limit_; }

    Polytope member(int m) const { return generator_(m); }
    double distance_to_limit(const Polytope& member) const;

    nlohmann::json spec() const { return {{"family", family_}, {"params", params_}}; }

private:
    std::string family_;
    nlohmann::json params_;
    std::function<Polytope(int)> generator_;
    LimitBody limit_;
};

struct BulgeOptions {
    double delta = 0.15;     // half-width of the edge-direction window (radians)
    int segments = 8;        // tilted edges per ramp
    double height_scale = 0.02;  // h_m = height_scale / m
};

/// Replaces the edge [v_a, v_b] of a 3-polytope by a convex roof of height h_m: a ramp of
/// `segments` edges tilted by angles delta, ..., delta/segments on each side of a flat ridge.
/// The tilt window does not shrink with m while h_m -> 0. delta = 0 gives vertex jitter of
/// size h_m; segments = 1 gives a single chamfer edge parallel to the original.
PolytopeSequence bulge_family(const Polytope& p, int va, int vb, const BulgeOptions& opts = {});

/// Single bulge member at an explicit height.
Polytope bulge_member(const Polytope& p, int va, int vb, double delta, int segments, double height);

/// Inscribed polytope on m quasi-uniform (Fibonacci) sphere points; m = 4 gives the regular
/// tetrahedron and radius 0 a single point.
Polytope ball_approximant(const Vec& center, double radius, int m);

/// Latitude/longitude polytope with `bands` latitude bands and 2*bands meridians around `axis`.
Polytope uv_sphere(const Vec& center, double radius, const Vec& axis, int bands);

PolytopeSequence ball_family(const Vec& center, double radius);
PolytopeSequence uv_ball_family(const Vec& center, double radius, const Vec& axis);

/// {"family": "bulge"|"ball"|"uv_ball", "params": {...}}
PolytopeSequence sequence_from_json(const nlohmann::json& j);

} // namespace valab
