#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "valab/linalg.hpp"

namespace valab {

/// Facet of a polytope within its affine hull: {x in aff(P) : normal . x <= offset}.
/// `normal` is a unit vector lying in the direction space of aff(P).
struct Facet {
    Vec normal;
    double offset = 0.0;
    std::vector<int> vertex_ids;  // sorted
};

/// Convex compact polytope in R^n, stored as its extreme points plus the derived facet list.
/// Lower-dimensional polytopes are allowed; their facets live inside the affine hull and the
/// ambient normal data is the orthogonal complement `normal_space()`.
class Polytope {
public:
    Polytope() = default;

    int ambient_dim() const { return ambient_dim_; }
    int affine_dim() const { return static_cast<int>(direction_basis_.cols()); }
    const std::vector<Vec>& vertices() const { return vertices_; }
    const std::vector<Facet>& facets() const { return facets_; }
    /// Orthonormal basis (n x d) of the direction space of the affine hull.
    const Mat& direction_basis() const { return direction_basis_; }
    /// Orthonormal basis (n x (n-d)) of the orthogonal complement of the direction space.
    const Mat& normal_space() const { return normal_space_; }
    const Vec& centroid() const { return centroid_; }

    /// Indices of facets containing each vertex.
    std::vector<std::vector<int>> vertex_facet_incidence() const;

    bool contains(const Vec& x, double tol = kTol) const;
    /// Support function h_P(u) = max_v u . v.
    double support(const Vec& u) const;

    Polytope translated(const Vec& t) const;
    Polytope scaled(double s) const;
    Polytope transformed(const Mat& linear) const;

    nlohmann::json to_json() const;

private:
    friend Polytope convex_hull(std::span<const Vec> points);
    friend Polytope build_polytope(int, std::vector<Vec>, std::vector<Facet>, Mat, Vec);

    int ambient_dim_ = 0;
    std::vector<Vec> vertices_;
    std::vector<Facet> facets_;
    Mat direction_basis_;
    Mat normal_space_;
    Vec centroid_;
};

/// Irredundant V-representation plus facets of conv(points).
/// Brute-force facet search over affinely independent subsets for small inputs;
/// three-dimensional inputs with many points use an incremental hull.
Polytope convex_hull(std::span<const Vec> points);
Polytope convex_hull(const std::vector<Vec>& points);

/// P_xi(y) = {x : xi_i . x <= y_i}. Throws EmptyPolytopeError / UnboundedPolytopeError.
Polytope hrep_polytope(std::span<const Vec> xi, std::span<const double> y);

/// Common test bodies.
Polytope unit_cube(int n);
Polytope box(std::span<const double> sides);
Polytope standard_simplex(int n);

/// {"dim": n, "vertices": [[...], ...]} or {"preset": "cube"|"simplex"|"box"|"point", ...}.
Polytope polytope_from_json(const nlohmann::json& j);

} // namespace valab

namespace valab::detail {

/// Facet of a full-dimensional point set in local coordinates.
struct LocalFacet {
    Vec normal;
    double offset = 0.0;
    std::vector<int> on;  // indices of points lying on the facet
};

/// Reference facet enumeration: every affinely independent d-subset spans a candidate
/// hyperplane that is kept when all points lie on one side.
std::vector<LocalFacet> bruteforce_facets(const std::vector<Vec>& pts, double tol = kTol);

/// Incremental hull for full-dimensional point sets in R^3 (coplanar triangles merged).
std::vector<LocalFacet> incremental_facets_3d(const std::vector<Vec>& pts, double tol = kTol);

} // namespace valab::detail
