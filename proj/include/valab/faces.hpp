#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "valab/kernel.hpp"
#include "valab/polytope.hpp"

namespace valab {

enum class Method { Auto, Exact, MC };

Method parse_method(const std::string& s);
std::string to_string(Method m);

struct Face {
    int k = 0;
    std::vector<int> vertex_ids;  // sorted ids into the parent's vertex list
    Mat dir_basis;                // n x k orthonormal basis of the direction space
    double kvol = 0.0;
    Vec interior_point;           // vertex centroid
    std::vector<int> facet_ids;   // parent facets containing the face

    nlohmann::json to_json() const;
};

/// All k-faces of P with positive k-volume, in lexicographic order of vertex ids.
/// When k equals the affine dimension of P the body itself is the only face.
std::vector<Face> enumerate_faces(const Polytope& p, int k);

/// k-dimensional volume of conv(points) (affine dimension k), by triangulating the hull and
/// summing Gram determinants.
double convex_volume(const std::vector<Vec>& points, int k);

struct Arc {
    double start = 0.0;  // angle in the perp_basis frame
    double width = 0.0;
};

/// Exterior angle of P at a face: the unit normals n in F-perp with n . (p - x) <= 0 for every
/// vertex p. Vectors inside the region are given in perp_basis coordinates.
struct NormalRegion {
    int n = 0;
    int k = 0;
    Mat perp_basis;                    // n x (n-k)
    std::vector<Vec> cone_generators;  // unit vectors, perp coordinates
    std::optional<Arc> arc;            // present iff n - k = 2
    bool full_sphere = false;          // face is the whole (k-dimensional) body
    std::vector<Vec> vertex_offsets;   // perp coordinates of p - x, zero offsets dropped
    std::optional<double> measure_cache;

    int sphere_dim() const { return n - k - 1; }
    bool contains(const Vec& u, double tol = kTol) const;
    nlohmann::json to_json() const;
};

NormalRegion exterior_angle(const Polytope& p, const Face& f);

struct Estimate {
    double value = 0.0;
    double error = 0.0;  // standard error (MC) or quadrature error estimate
    Method method = Method::Exact;
    long samples = 0;
};

/// Normalized measure of the region. Exact when the sphere has dimension <= 1 or the region is
/// the full sphere; otherwise Monte Carlo with a standard error.
Estimate region_measure(const NormalRegion& r, Method method = Method::Auto, long samples = 100000,
                        std::uint64_t seed = 0);

/// Inner integral of f(F-bar, l) over the region with the mass-one measure on S(F-bar-perp).
/// Checks evenness of f at a few directions first.
Estimate integrate_kernel_over_region(const Kernel& f, const Face& face, const NormalRegion& r,
                                      Method method = Method::Auto, long samples = 100000,
                                      std::uint64_t seed = 0);

} // namespace valab
