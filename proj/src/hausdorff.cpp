#include "valab/hausdorff.hpp"

#include <algorithm>
#include <cmath>

#include "valab/error.hpp"
#include "valab/quadrature.hpp"

namespace valab {

Projection project_onto_polytope(const Polytope& p, const Vec& x, double gap_tol, int max_iter) {
    if (x.size() != p.ambient_dim()) throw ValidationError("project_onto_polytope: dimension mismatch");
    const auto& verts = p.vertices();
    const int m = static_cast<int>(verts.size());
    std::vector<Vec> q(m);
    for (int i = 0; i < m; ++i) q[i] = verts[i] - x;

    int start = 0;
    for (int i = 1; i < m; ++i)
        if (q[i].squaredNorm() < q[start].squaredNorm()) start = i;
    std::vector<int> active{start};
    std::vector<double> lambda{1.0};
    Vec y = q[start];

    Projection out;
    for (int iter = 0; iter < max_iter; ++iter) {
        out.iterations = iter + 1;
        int j = 0;
        double best = q[0].dot(y);
        for (int i = 1; i < m; ++i) {
            const double v = q[i].dot(y);
            if (v < best) { best = v; j = i; }
        }
        const double gap = y.squaredNorm() - best;
        if (gap <= gap_tol || std::find(active.begin(), active.end(), j) != active.end()) {
            out.gap = std::max(gap, 0.0);
            out.point = y + x;
            out.distance = y.norm();
            return out;
        }
        active.push_back(j);
        lambda.push_back(0.0);

        while (true) {
            const int k = static_cast<int>(active.size());
            // Affine minimum-norm point over the active set.
            Mat sys = Mat::Zero(k + 1, k + 1);
            Vec rhs = Vec::Zero(k + 1);
            for (int a = 0; a < k; ++a) {
                for (int b = 0; b < k; ++b) sys(a, b) = q[active[a]].dot(q[active[b]]);
                sys(a, k) = 1.0;
                sys(k, a) = 1.0;
            }
            rhs(k) = 1.0;
            const Vec sol = sys.completeOrthogonalDecomposition().solve(rhs);
            Vec mu = sol.head(k);
            bool interior = true;
            for (int a = 0; a < k; ++a)
                if (mu(a) <= 1e-14) { interior = false; break; }
            if (interior) {
                for (int a = 0; a < k; ++a) lambda[a] = mu(a);
                break;
            }
            double theta = 1.0;
            for (int a = 0; a < k; ++a) {
                if (mu(a) <= 1e-14) {
                    const double denom = lambda[a] - mu(a);
                    if (denom > 0) theta = std::min(theta, lambda[a] / denom);
                }
            }
            for (int a = 0; a < k; ++a) lambda[a] = lambda[a] + theta * (mu(a) - lambda[a]);
            std::vector<int> keep_idx;
            std::vector<double> keep_lambda;
            for (int a = 0; a < k; ++a) {
                if (lambda[a] > 1e-14) {
                    keep_idx.push_back(active[a]);
                    keep_lambda.push_back(lambda[a]);
                }
            }
            if (keep_idx.empty()) {  // numerical breakdown: restart from the best vertex
                keep_idx = {j};
                keep_lambda = {1.0};
            }
            active = std::move(keep_idx);
            lambda = std::move(keep_lambda);
            double total = 0.0;
            for (double l : lambda) total += l;
            for (double& l : lambda) l /= total;
        }
        y = Vec::Zero(x.size());
        for (std::size_t a = 0; a < active.size(); ++a) y += lambda[a] * q[active[a]];
    }
    throw NumericalError("project_onto_polytope: iteration cap reached before the duality gap closed");
}

double point_distance(const Polytope& p, const Vec& x) { return project_onto_polytope(p, x).distance; }

double directed_hausdorff(const Polytope& p, const Polytope& q) {
    if (p.ambient_dim() != q.ambient_dim()) throw ValidationError("hausdorff: dimension mismatch");
    double best = 0.0;
    for (const Vec& v : p.vertices()) best = std::max(best, point_distance(q, v));
    return best;
}

double hausdorff_distance(const Polytope& p, const Polytope& q) {
    return std::max(directed_hausdorff(p, q), directed_hausdorff(q, p));
}

double hausdorff_distance(const Polytope& p, const Ball& b) {
    if (b.center.size() != p.ambient_dim()) throw ValidationError("hausdorff: dimension mismatch");
    // Polytope -> ball: farthest vertex outside the ball.
    double out = 0.0;
    for (const Vec& v : p.vertices()) out = std::max(out, (v - b.center).norm() - b.radius);
    // Ball -> polytope: R - min_u (h_P(u) - c.u). For a full-dimensional polytope containing the
    // centre the minimum of the support gap is attained at a facet normal.
    double in = 0.0;
    if (p.affine_dim() == p.ambient_dim() && p.contains(b.center)) {
        double depth = 1e300;
        for (const Facet& f : p.facets()) depth = std::min(depth, f.offset - f.normal.dot(b.center));
        in = b.radius - depth;
    } else {
        // General position: distance from far ball points to P, evaluated on a direction grid.
        const SphereGrid grid = make_sphere_grid(48, 96);
        if (p.ambient_dim() != 3) throw ValidationError("hausdorff to ball: only R^3 supported");
        for (const Vec& u : grid.points) in = std::max(in, b.radius + u.dot(b.center) - p.support(u));
    }
    return std::max(out, in);
}

} // namespace valab
