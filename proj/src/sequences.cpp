#include "valab/sequences.hpp"

#include <cmath>

#include "valab/error.hpp"

namespace valab {

double PolytopeSequence::distance_to_limit(const Polytope& member) const {
    return std::visit([&](const auto& body) { return hausdorff_distance(member, body); }, limit_);
}

namespace {

// Unit outward direction at the edge: mean of incident facet normals, falling back to the
// normal space of a lower-dimensional body.
Vec outward_direction(const Polytope& p, int va, int vb) {
    const int n = p.ambient_dim();
    const Vec e = (p.vertices()[vb] - p.vertices()[va]).normalized();
    Vec sum = Vec::Zero(n);
    Mat normals(n, 0);
    for (const Facet& f : p.facets()) {
        const bool has_a = std::binary_search(f.vertex_ids.begin(), f.vertex_ids.end(), va);
        const bool has_b = std::binary_search(f.vertex_ids.begin(), f.vertex_ids.end(), vb);
        if (has_a && has_b) {
            sum += f.normal;
            normals.conservativeResize(n, normals.cols() + 1);
            normals.col(normals.cols() - 1) = f.normal;
        }
    }
    Mat span(n, normals.cols() + p.normal_space().cols());
    span << normals, p.normal_space();
    if (orthonormal_basis(span).cols() != n - 1) throw ValidationError("bulge: vertices do not span an edge of the polytope");
    sum -= sum.dot(e) * e;
    if (sum.norm() > 1e-9) return sum.normalized();
    Vec w = p.normal_space().col(0);
    w -= w.dot(e) * e;
    return w.normalized();
}

} // namespace

Polytope bulge_member(const Polytope& p, int va, int vb, double delta, int segments, double height) {
    if (p.ambient_dim() != 3) throw ValidationError("bulge: ambient dimension must be 3");
    const int nv = static_cast<int>(p.vertices().size());
    if (va < 0 || vb < 0 || va >= nv || vb >= nv || va == vb) throw ValidationError("bulge: bad edge vertex ids");
    if (segments < 1) throw ValidationError("bulge: segments must be >= 1");
    if (!(height > 0)) throw ValidationError("bulge: height must be positive");
    if (delta < 0 || delta >= 0.5 * kPi) throw ValidationError("bulge: delta outside [0, pi/2): non-convex bulge");

    const Vec a = p.vertices()[va];
    const Vec b = p.vertices()[vb];
    const double len = (b - a).norm();
    const Vec e = (b - a) / len;
    const Vec w = outward_direction(p, va, vb);

    std::vector<Vec> pts;
    if (delta == 0.0) {
        for (int i = 0; i < nv; ++i) {
            if (i == va || i == vb) pts.push_back(p.vertices()[i] + height * w);
            else pts.push_back(p.vertices()[i]);
        }
        return convex_hull(pts);
    }

    double slope_sum = 0.0;
    for (int i = 0; i < segments; ++i) slope_sum += std::tan(delta * (segments - i) / segments);
    const double run = height / slope_sum;
    if (2.0 * segments * run >= len * (1.0 - 1e-6))
        throw ValidationError("bulge: ramps do not fit on the edge (height too large for delta)");

    pts = p.vertices();
    Vec up = a, down = b;
    for (int i = 0; i < segments; ++i) {
        const double slope = std::tan(delta * (segments - i) / segments);
        up += run * e + run * slope * w;
        down += -run * e + run * slope * w;
        pts.push_back(up);
        pts.push_back(down);
    }
    return convex_hull(pts);
}

PolytopeSequence bulge_family(const Polytope& p, int va, int vb, const BulgeOptions& opts) {
    // Validate once at construction with the first member.
    (void)outward_direction(p, va, vb);
    nlohmann::json params = {{"polytope", p.to_json()},
                             {"edge", {va, vb}},
                             {"delta", opts.delta},
                             {"segments", opts.segments},
                             {"height_scale", opts.height_scale}};
    auto gen = [p, va, vb, opts](int m) {
        if (m < 1) throw ValidationError("bulge: member index must be >= 1");
        return bulge_member(p, va, vb, opts.delta, opts.segments, opts.height_scale / m);
    };
    return PolytopeSequence("bulge", std::move(params), gen, p);
}

Polytope ball_approximant(const Vec& center, double radius, int m) {
    if (center.size() != 3) throw ValidationError("ball_approximant: R^3 only");
    if (radius < 0) throw ValidationError("ball_approximant: negative radius");
    if (radius == 0) return convex_hull(std::vector<Vec>{center});
    if (m < 4) throw ValidationError("ball_approximant: need at least 4 points to span R^3");
    std::vector<Vec> pts;
    if (m == 4) {
        const double s = 1.0 / std::sqrt(3.0);
        for (const auto& d : {Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(1, -1, -1), Eigen::Vector3d(-1, 1, -1),
                              Eigen::Vector3d(-1, -1, 1)})
            pts.push_back(center + radius * s * Vec(d));
        return convex_hull(pts);
    }
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < m; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / m;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        Vec u(3);
        u << r * std::cos(phi), r * std::sin(phi), z;
        pts.push_back(center + radius * u);
    }
    return convex_hull(pts);
}

Polytope uv_sphere(const Vec& center, double radius, const Vec& axis, int bands) {
    if (center.size() != 3 || axis.size() != 3) throw ValidationError("uv_sphere: R^3 only");
    if (bands < 2) throw ValidationError("uv_sphere: need at least 2 bands");
    if (!(radius > 0)) throw ValidationError("uv_sphere: radius must be positive");
    const Vec a = axis.normalized();
    int least = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(a(i)) < std::abs(a(least))) least = i;
    Vec b1 = Vec::Unit(3, least) - a(least) * a;
    b1.normalize();
    const Vec b2 = cross3(a, b1);
    const int meridians = 2 * bands;
    std::vector<Vec> pts{center - radius * a, center + radius * a};
    for (int i = 1; i < bands; ++i) {
        const double lat = -0.5 * kPi + kPi * i / bands;
        for (int j = 0; j < meridians; ++j) {
            const double lon = 2.0 * kPi * j / meridians;
            pts.push_back(center + radius * (std::sin(lat) * a +
                                             std::cos(lat) * (std::cos(lon) * b1 + std::sin(lon) * b2)));
        }
    }
    return convex_hull(pts);
}

PolytopeSequence ball_family(const Vec& center, double radius) {
    nlohmann::json params = {{"center", std::vector<double>(center.data(), center.data() + center.size())},
                             {"radius", radius}};
    auto gen = [center, radius](int m) { return ball_approximant(center, radius, m); };
    return PolytopeSequence("ball", std::move(params), gen, Ball{center, radius});
}

PolytopeSequence uv_ball_family(const Vec& center, double radius, const Vec& axis) {
    nlohmann::json params = {{"center", std::vector<double>(center.data(), center.data() + center.size())},
                             {"radius", radius},
                             {"axis", std::vector<double>(axis.data(), axis.data() + axis.size())}};
    auto gen = [center, radius, axis](int m) { return uv_sphere(center, radius, axis, m); };
    return PolytopeSequence("uv_ball", std::move(params), gen, Ball{center, radius});
}

namespace {

Vec json_vec(const nlohmann::json& j, const char* key, Vec fallback) {
    if (!j.contains(key)) return fallback;
    const auto v = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

PolytopeSequence sequence_from_json(const nlohmann::json& j) {
    try {
        const std::string family = j.at("family").get<std::string>();
        const nlohmann::json params = j.value("params", nlohmann::json::object());
        if (family == "bulge") {
            const Polytope p = params.contains("polytope") ? polytope_from_json(params.at("polytope"))
                                                           : standard_simplex(3);
            const auto edge = params.value("edge", std::vector<int>{0, 1});
            if (edge.size() != 2) throw ValidationError("bulge: 'edge' must list two vertex ids");
            BulgeOptions opts;
            opts.delta = params.value("delta", opts.delta);
            opts.segments = params.value("segments", opts.segments);
            opts.height_scale = params.value("height_scale", opts.height_scale);
            return bulge_family(p, edge[0], edge[1], opts);
        }
        const Vec center = json_vec(params, "center", Vec::Zero(3));
        const double radius = params.value("radius", 1.0);
        if (family == "ball") return ball_family(center, radius);
        if (family == "uv_ball") return uv_ball_family(center, radius, json_vec(params, "axis", Vec::Unit(3, 2)));
        throw ValidationError("unknown sequence family '" + family + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("sequence json: ") + e.what());
    }
}

} // namespace valab
