#include "valab/faces.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "valab/error.hpp"
#include "valab/parallel.hpp"
#include "valab/quadrature.hpp"

namespace valab {

Method parse_method(const std::string& s) {
    if (s == "auto") return Method::Auto;
    if (s == "exact") return Method::Exact;
    if (s == "mc") return Method::MC;
    throw ValidationError("unknown method '" + s + "' (expected auto, exact or mc)");
}

std::string to_string(Method m) {
    switch (m) {
    case Method::Auto: return "auto";
    case Method::Exact: return "exact";
    case Method::MC: return "mc";
    }
    return "auto";
}

void Kernel::require_dims(int ambient, int degree) const {
    if (ambient != n || degree != k)
        throw ValidationError("kernel '" + label + "' is defined on G_" + std::to_string(k) + "(R^" + std::to_string(n) +
                              "), got k=" + std::to_string(degree) + " in R^" + std::to_string(ambient));
}

nlohmann::json Face::to_json() const {
    return {{"k", k},
            {"vertex_ids", vertex_ids},
            {"kvol", kvol},
            {"interior_point", std::vector<double>(interior_point.data(), interior_point.data() + interior_point.size())}};
}

namespace {

Mat difference_matrix(const std::vector<Vec>& pts) {
    Mat d(pts[0].size(), static_cast<Eigen::Index>(pts.size()) - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) d.col(static_cast<Eigen::Index>(i) - 1) = pts[i] - pts[0];
    return d;
}

int subset_dim(const Polytope& p, const std::vector<int>& ids) {
    if (ids.size() <= 1) return 0;
    std::vector<Vec> pts;
    for (int i : ids) pts.push_back(p.vertices()[i]);
    return static_cast<int>(orthonormal_basis(difference_matrix(pts)).cols());
}

// Simplices of a triangulation of conv(points): pulling from the centroid, recursing into facets.
void triangulate(const std::vector<Vec>& points, std::vector<std::vector<Vec>>& out) {
    const Polytope hull = convex_hull(points);
    const int d = hull.affine_dim();
    if (d == 0) {
        out.push_back({hull.vertices()[0]});
        return;
    }
    if (d == 1) {
        out.push_back({hull.vertices()[0], hull.vertices()[1]});
        return;
    }
    Vec c = Vec::Zero(hull.ambient_dim());
    for (const Vec& v : hull.vertices()) c += v;
    c /= static_cast<double>(hull.vertices().size());
    for (const Facet& f : hull.facets()) {
        std::vector<Vec> sub;
        for (int id : f.vertex_ids) sub.push_back(hull.vertices()[id]);
        std::vector<std::vector<Vec>> pieces;
        triangulate(sub, pieces);
        for (auto& s : pieces) {
            s.push_back(c);
            out.push_back(std::move(s));
        }
    }
}

} // namespace

double convex_volume(const std::vector<Vec>& points, int k) {
    if (points.empty()) return 0.0;
    if (k == 0) return 1.0;
    std::vector<std::vector<Vec>> simplices;
    triangulate(points, simplices);
    double factorial = 1.0;
    for (int i = 2; i <= k; ++i) factorial *= i;
    std::vector<double> vols;
    for (const auto& s : simplices) {
        if (static_cast<int>(s.size()) != k + 1) return 0.0;  // lower-dimensional hull
        const Mat m = difference_matrix(s);
        vols.push_back(std::sqrt(std::max(0.0, (m.transpose() * m).determinant())) / factorial);
    }
    return pairwise_sum(vols);
}

std::vector<Face> enumerate_faces(const Polytope& p, int k) {
    const int n = p.ambient_dim();
    if (k < 1 || k > n - 1) throw ValidationError("enumerate_faces: k must satisfy 1 <= k <= n-1");
    const int d = p.affine_dim();
    if (k > d) return {};

    std::set<std::vector<int>> level;
    const auto incidence = p.vertex_facet_incidence();
    if (k == d) {
        std::vector<int> all(p.vertices().size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        level.insert(all);
    } else {
        for (const Facet& f : p.facets()) level.insert(f.vertex_ids);
        for (int j = d - 2; j >= k; --j) {
            std::set<std::vector<int>> next;
            for (const auto& g : level) {
                std::set<int> candidates;
                for (int v : g) candidates.insert(incidence[v].begin(), incidence[v].end());
                for (int fid : candidates) {
                    const auto& fv = p.facets()[fid].vertex_ids;
                    std::vector<int> meet;
                    std::set_intersection(g.begin(), g.end(), fv.begin(), fv.end(), std::back_inserter(meet));
                    if (meet.size() == g.size() || static_cast<int>(meet.size()) < j + 1) continue;
                    if (next.count(meet)) continue;
                    if (subset_dim(p, meet) == j) next.insert(std::move(meet));
                }
            }
            level = std::move(next);
        }
    }

    std::vector<Face> faces;
    for (const auto& ids : level) {
        std::vector<Vec> pts;
        for (int i : ids) pts.push_back(p.vertices()[i]);
        Face f;
        f.k = k;
        f.vertex_ids = ids;
        f.dir_basis = pts.size() > 1 ? orthonormal_basis(difference_matrix(pts)) : Mat(n, 0);
        if (f.dir_basis.cols() != k) continue;
        f.interior_point = Vec::Zero(n);
        for (const Vec& v : pts) f.interior_point += v;
        f.interior_point /= static_cast<double>(pts.size());
        f.kvol = convex_volume(pts, k);
        if (f.kvol <= kTol) continue;
        if (k < d) {
            // facets containing the face all contain its first vertex
            for (int fid : incidence[ids.front()]) {
                const auto& fv = p.facets()[fid].vertex_ids;
                if (std::includes(fv.begin(), fv.end(), ids.begin(), ids.end())) f.facet_ids.push_back(fid);
            }
        }
        faces.push_back(std::move(f));
    }
    return faces;
}

bool NormalRegion::contains(const Vec& u, double tol) const {
    for (const Vec& w : vertex_offsets)
        if (u.dot(w) > tol) return false;
    return true;
}

nlohmann::json NormalRegion::to_json() const {
    nlohmann::json gens = nlohmann::json::array();
    for (const Vec& g : cone_generators) gens.push_back(std::vector<double>(g.data(), g.data() + g.size()));
    nlohmann::json j = {{"perp_dim", n - k}, {"full_sphere", full_sphere}, {"cone_generators", gens}};
    j["arc"] = arc ? nlohmann::json{{"start", arc->start}, {"width", arc->width}} : nlohmann::json(nullptr);
    j["measure"] = measure_cache ? nlohmann::json(*measure_cache) : nlohmann::json(nullptr);
    return j;
}

namespace {
constexpr std::size_t kAllVertexLimit = 256;
} // namespace

NormalRegion exterior_angle(const Polytope& p, const Face& f) {
    const int n = p.ambient_dim();
    if (f.dir_basis.rows() != n || f.dir_basis.cols() != f.k || f.kvol <= 0)
        throw ValidationError("exterior_angle: face does not match the polytope");
    for (int id : f.vertex_ids)
        if (id < 0 || id >= static_cast<int>(p.vertices().size()))
            throw ValidationError("exterior_angle: face vertex id out of range");

    NormalRegion r;
    r.n = n;
    r.k = f.k;
    r.perp_basis = orthogonal_complement(f.dir_basis, n);
    r.full_sphere = f.k == p.affine_dim();
    for (int fid : f.facet_ids) r.cone_generators.push_back((r.perp_basis.transpose() * p.facets()[fid].normal).normalized());
    for (Eigen::Index c = 0; c < p.normal_space().cols(); ++c) {
        const Vec g = r.perp_basis.transpose() * p.normal_space().col(c);
        r.cone_generators.push_back(g);
        r.cone_generators.push_back(-g);
    }
    const double scale = 1.0 + (p.vertices()[0] - f.interior_point).norm();
    // Large bodies: the tangent cone at F is already spanned by the vertices of the incident
    // facets, unless F is a facet of a lower-dimensional body.
    std::vector<int> ids;
    if (p.vertices().size() > kAllVertexLimit && f.k + 1 < p.affine_dim()) {
        for (int fid : f.facet_ids) ids.insert(ids.end(), p.facets()[fid].vertex_ids.begin(), p.facets()[fid].vertex_ids.end());
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    } else {
        ids.resize(p.vertices().size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    }
    for (int id : ids) {
        const Vec w = r.perp_basis.transpose() * (p.vertices()[id] - f.interior_point);
        if (w.norm() > kTol * scale) r.vertex_offsets.push_back(w);
    }
    // Every generator must pass the defining vertex inequality; a failure means the face
    // was not taken from this polytope.
    if (!r.full_sphere)
        for (const Vec& g : r.cone_generators)
            if (!r.contains(g, 1e-7 * scale)) throw ValidationError("exterior_angle: face does not belong to the polytope");

    if (n - f.k == 2) {
        if (r.full_sphere) {
            r.arc = Arc{0.0, 2.0 * kPi};
        } else if (r.cone_generators.empty()) {
            r.arc = Arc{0.0, 0.0};
        } else {
            std::vector<double> ang;
            for (const Vec& g : r.cone_generators) ang.push_back(std::atan2(g(1), g(0)));
            std::sort(ang.begin(), ang.end());
            double gap = ang.front() + 2.0 * kPi - ang.back();
            double start = ang.front();
            for (std::size_t i = 1; i < ang.size(); ++i) {
                if (ang[i] - ang[i - 1] > gap) {
                    gap = ang[i] - ang[i - 1];
                    start = ang[i];
                }
            }
            r.arc = Arc{start, std::max(0.0, 2.0 * kPi - gap)};
        }
        r.measure_cache = r.arc->width / (2.0 * kPi);
    } else if (r.full_sphere) {
        r.measure_cache = 1.0;
    } else if (n - f.k == 1) {
        Vec u(1);
        u << 1.0;
        r.measure_cache = 0.5 * (r.contains(u) + r.contains(-u));
    }
    return r;
}

namespace {

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
};

// Uniform directions on the sphere of F-perp; g receives (perp coordinates, ambient direction).
Estimate monte_carlo(const NormalRegion& r, long samples, std::uint64_t seed,
                     const std::function<double(const Vec&, const Vec&)>& g) {
    if (samples < 2) throw ValidationError("monte carlo: need at least 2 samples");
    constexpr long kBatch = 1 << 15;
    const long batches = (samples + kBatch - 1) / kBatch;
    std::vector<Moments> parts(static_cast<std::size_t>(batches));
    const int q = r.n - r.k;
    parallel_for(parts.size(), [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        std::normal_distribution<double> normal;
        const long count = std::min(kBatch, samples - static_cast<long>(b) * kBatch);
        Moments m;
        Vec u(q);
        for (long i = 0; i < count; ++i) {
            double norm = 0.0;
            do {
                for (int c = 0; c < q; ++c) u(c) = normal(rng);
                norm = u.norm();
            } while (norm < 1e-12);
            u /= norm;
            if (!r.contains(u)) continue;
            const double v = g(u, r.perp_basis * u);
            m.sum += v;
            m.sum_sq += v * v;
        }
        parts[b] = m;
    });
    std::vector<double> sums, squares;
    for (const Moments& m : parts) {
        sums.push_back(m.sum);
        squares.push_back(m.sum_sq);
    }
    const double nn = static_cast<double>(samples);
    const double mean = pairwise_sum(sums) / nn;
    const double var = std::max(0.0, (pairwise_sum(squares) - nn * mean * mean) / (nn - 1.0));
    return {mean, std::sqrt(var / nn), Method::MC, samples};
}

bool exact_available(const NormalRegion& r) { return r.full_sphere || r.n - r.k <= 2; }

Method resolve(const NormalRegion& r, Method m) {
    if (m == Method::Auto) return exact_available(r) ? Method::Exact : Method::MC;
    if (m == Method::Exact && !exact_available(r))
        throw ValidationError("exact measure is only available on spheres of dimension <= 1");
    return m;
}

void check_even(const Kernel& f, const Mat& e, const NormalRegion& r) {
    const int q = r.n - r.k;
    for (int t = 0; t < 3; ++t) {
        Vec u = Vec::Zero(q);
        for (int c = 0; c < q; ++c) u(c) = std::cos(0.7 + 1.3 * t + 0.9 * c);
        if (u.norm() < 1e-6) u(0) = 1.0;
        u.normalize();
        const Vec l = r.perp_basis * u;
        const double a = f(e, l), b = f(e, -l);
        if (!std::isfinite(a) || !std::isfinite(b)) throw NumericalError("kernel '" + f.label + "' returned a non-finite value");
        if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(a))) throw ValidationError("kernel '" + f.label + "' is not even in l");
    }
}

} // namespace

Estimate region_measure(const NormalRegion& r, Method method, long samples, std::uint64_t seed) {
    if (resolve(r, method) == Method::MC)
        return monte_carlo(r, samples, seed, [](const Vec&, const Vec&) { return 1.0; });
    return {*r.measure_cache, 0.0, Method::Exact, 0};
}

Estimate integrate_kernel_over_region(const Kernel& f, const Face& face, const NormalRegion& r, Method method,
                                      long samples, std::uint64_t seed) {
    f.require_dims(r.n, face.k);
    const Mat& e = face.dir_basis;
    check_even(f, e, r);
    if (resolve(r, method) == Method::MC)
        return monte_carlo(r, samples, seed, [&](const Vec&, const Vec& l) { return f(e, l); });

    const int q = r.n - r.k;
    if (q == 1) {
        const Vec u = r.perp_basis.col(0);
        Vec one(1);
        one << 1.0;
        double v = 0.0;
        if (r.contains(one)) v += 0.5 * f(e, u);
        if (r.contains(-one)) v += 0.5 * f(e, -u);
        return {v, 0.0, Method::Exact, 0};
    }
    if (q == 2) {
        if (r.arc->width <= 0.0) return {0.0, 0.0, Method::Exact, 0};
        const Vec b0 = r.perp_basis.col(0), b1 = r.perp_basis.col(1);
        const auto res = integrate_adaptive([&](double t) { return f(e, std::cos(t) * b0 + std::sin(t) * b1); },
                                            r.arc->start, r.arc->start + r.arc->width, 1e-10);
        return {res.value / (2.0 * kPi), res.error / (2.0 * kPi), Method::Exact, 0};
    }
    // full sphere of dimension >= 2: deterministic product rule, error from an order comparison
    auto h = [&](const Vec& l) { return f(e, l); };
    const double fine = sphere_average(r.perp_basis, h, SphereOrders{32, 96, false});
    const double coarse = sphere_average(r.perp_basis, h, SphereOrders{24, 64, false});
    return {fine, std::abs(fine - coarse), Method::Exact, 0};
}

} // namespace valab
