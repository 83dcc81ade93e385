#include "valab/polytope.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "valab/error.hpp"

namespace valab {

namespace detail {

namespace {

// Visits all k-subsets of {0..n-1} in lexicographic order; stops when fn returns false.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
    if (k > n || k <= 0) return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        if (!fn(idx)) return;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::vector<int> on_set(const std::vector<Vec>& pts, const Vec& a, double b, double tol) {
    std::vector<int> on;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
        if (std::abs(a.dot(pts[i]) - b) <= tol) on.push_back(i);
    return on;
}

} // namespace

std::vector<LocalFacet> bruteforce_facets(const std::vector<Vec>& pts, double tol) {
    const int n = static_cast<int>(pts.size());
    if (n == 0) return {};
    const int d = static_cast<int>(pts.front().size());
    std::vector<LocalFacet> facets;
    std::vector<std::vector<char>> member;  // membership flags per found facet
    std::set<std::vector<int>> seen;

    for_each_combination(n, d, [&](const std::vector<int>& idx) {
        for (const auto& flags : member) {
            bool all = true;
            for (int i : idx)
                if (!flags[i]) { all = false; break; }
            if (all) return true;
        }
        Mat diffs(d - 1, d);
        for (int r = 1; r < d; ++r) diffs.row(r - 1) = (pts[idx[r]] - pts[idx[0]]).transpose();
        Vec a;
        if (d == 1) {
            a = Vec::Ones(1);
        } else {
            Eigen::JacobiSVD<Mat> svd(diffs, Eigen::ComputeFullV);
            const auto& s = svd.singularValues();
            if (s.size() < d - 1 || s(d - 2) <= tol) return true;  // affinely dependent
            a = svd.matrixV().col(d - 1);
        }
        double b = a.dot(pts[idx[0]]);
        bool any_pos = false, any_neg = false;
        for (const Vec& p : pts) {
            const double s = a.dot(p) - b;
            if (s > tol) any_pos = true;
            if (s < -tol) any_neg = true;
            if (any_pos && any_neg) return true;
        }
        if (any_pos) { a = -a; b = -b; }
        std::vector<int> on = on_set(pts, a, b, tol);
        if (seen.insert(on).second) {
            std::vector<char> flags(n, 0);
            for (int i : on) flags[i] = 1;
            member.push_back(std::move(flags));
            facets.push_back({a, b, std::move(on)});
        }
        return true;
    });
    return facets;
}

namespace {

using V3 = Eigen::Vector3d;

struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};  // neighbour across edge (v[i], v[i+1])
    V3 normal;
    double offset = 0.0;
    bool alive = true;
};

bool make_plane(const std::vector<V3>& p, Tri& t) {
    const V3 c = (p[t.v[1]] - p[t.v[0]]).cross(p[t.v[2]] - p[t.v[0]]);
    const double len = c.norm();
    if (len < 1e-300) return false;
    t.normal = c / len;
    t.offset = t.normal.dot(p[t.v[0]]);
    return true;
}

} // namespace

std::vector<LocalFacet> incremental_facets_3d(const std::vector<Vec>& in, double tol) {
    const int n = static_cast<int>(in.size());
    std::vector<V3> p(n);
    for (int i = 0; i < n; ++i) p[i] = V3(in[i](0), in[i](1), in[i](2));
    const double plane_eps = 1e-11;

    // Initial tetrahedron from extreme points.
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (p[i].x() < p[i0].x()) i0 = i;
    int i1 = -1;
    double best = -1;
    for (int i = 0; i < n; ++i) {
        const double d = (p[i] - p[i0]).squaredNorm();
        if (d > best) { best = d; i1 = i; }
    }
    int i2 = -1;
    best = -1;
    const V3 dir = (p[i1] - p[i0]).normalized();
    for (int i = 0; i < n; ++i) {
        const double d = (p[i] - p[i0]).cross(dir).squaredNorm();
        if (d > best) { best = d; i2 = i; }
    }
    const V3 nrm = (p[i1] - p[i0]).cross(p[i2] - p[i0]).normalized();
    int i3 = -1;
    best = -1;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(nrm.dot(p[i] - p[i0]));
        if (d > best) { best = d; i3 = i; }
    }
    if (best <= tol) throw NumericalError("incremental hull: point set is not full-dimensional");

    std::vector<Tri> tris;
    const V3 inside = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
    const std::array<std::array<int, 3>, 4> init = {{{i0, i1, i2}, {i0, i1, i3}, {i0, i2, i3}, {i1, i2, i3}}};
    for (auto f : init) {
        Tri t;
        t.v = f;
        make_plane(p, t);
        if (t.normal.dot(inside) - t.offset > 0) {
            std::swap(t.v[1], t.v[2]);
            make_plane(p, t);
        }
        tris.push_back(t);
    }
    auto link_all = [&](std::vector<int> ids) {
        std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;
        for (int id : ids)
            for (int e = 0; e < 3; ++e) edge_owner[{tris[id].v[e], tris[id].v[(e + 1) % 3]}] = {id, e};
        for (int id : ids)
            for (int e = 0; e < 3; ++e) {
                auto it = edge_owner.find({tris[id].v[(e + 1) % 3], tris[id].v[e]});
                if (it != edge_owner.end()) tris[id].nb[e] = it->second.first;
            }
    };
    link_all({0, 1, 2, 3});

    std::vector<char> used(n, 0);
    used[i0] = used[i1] = used[i2] = used[i3] = 1;
    std::vector<char> visible;
    for (int ip = 0; ip < n; ++ip) {
        if (used[ip]) continue;
        const V3& x = p[ip];
        visible.assign(tris.size(), 0);
        bool any = false;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive) continue;
            const double dist = tris[t].normal.dot(x) - tris[t].offset;
            if (dist > plane_eps) {
                visible[t] = 1;
                any = true;
            }
        }
        if (!any) continue;

        // Horizon edges in the orientation of the visible faces.
        std::vector<std::array<int, 3>> horizon;  // a, b, outside neighbour
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!visible[t]) continue;
            for (int e = 0; e < 3; ++e) {
                const int nb = tris[t].nb[e];
                if (nb < 0 || !visible[nb]) horizon.push_back({tris[t].v[e], tris[t].v[(e + 1) % 3], nb});
            }
        }
        for (std::size_t t = 0; t < tris.size(); ++t)
            if (visible[t]) tris[t].alive = false;

        std::map<int, int> starts_at;  // horizon start vertex -> new face
        std::vector<int> created;
        for (const auto& h : horizon) {
            Tri t;
            t.v = {h[0], h[1], ip};
            if (!make_plane(p, t)) throw NumericalError("incremental hull: degenerate facet");
            t.nb[0] = h[2];
            const int id = static_cast<int>(tris.size());
            tris.push_back(t);
            created.push_back(id);
            starts_at[h[0]] = id;
            if (h[2] >= 0) {
                Tri& other = tris[h[2]];
                for (int e = 0; e < 3; ++e)
                    if (other.v[e] == h[1] && other.v[(e + 1) % 3] == h[0]) other.nb[e] = id;
            }
        }
        for (int id : created) {
            Tri& t = tris[id];
            // edge (b, p): neighbour is the new face starting at b; edge (p, a): the one ending at a
            t.nb[1] = starts_at.at(t.v[1]);
        }
        for (int id : created) {
            const int next = tris[id].nb[1];
            tris[next].nb[2] = id;
        }
        used[ip] = 1;
    }

    // Merge coplanar neighbours.
    std::vector<int> parent(tris.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t t = 0; t < tris.size(); ++t) {
        if (!tris[t].alive) continue;
        for (int e = 0; e < 3; ++e) {
            const int nb = tris[t].nb[e];
            if (nb < 0 || !tris[nb].alive) continue;
            if ((tris[t].normal - tris[nb].normal).norm() <= tol && std::abs(tris[t].offset - tris[nb].offset) <= tol)
                parent[find(static_cast<int>(t))] = find(nb);
        }
    }
    std::map<int, std::vector<int>> groups;
    for (std::size_t t = 0; t < tris.size(); ++t)
        if (tris[t].alive) groups[find(static_cast<int>(t))].push_back(static_cast<int>(t));

    std::vector<LocalFacet> facets;
    for (const auto& [root, members] : groups) {
        V3 nsum = V3::Zero();
        for (int t : members) nsum += tris[t].normal;
        const V3 a = nsum.normalized();
        double b = -1e300;
        for (int t : members)
            for (int v : tris[t].v) b = std::max(b, a.dot(p[v]));
        LocalFacet f;
        f.normal = Vec(3);
        f.normal << a.x(), a.y(), a.z();
        f.offset = b;
        for (int i = 0; i < n; ++i)
            if (std::abs(a.dot(p[i]) - b) <= tol) f.on.push_back(i);
        facets.push_back(std::move(f));
    }
    return facets;
}

} // namespace detail

namespace {

std::vector<detail::LocalFacet> monotone_chain_facets(const std::vector<Vec>& pts, double tol) {
    const int n = static_cast<int>(pts.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (pts[a](0) != pts[b](0)) return pts[a](0) < pts[b](0);
        return pts[a](1) < pts[b](1);
    });
    auto turn = [&](int o, int a, int b) {
        return (pts[a](0) - pts[o](0)) * (pts[b](1) - pts[o](1)) - (pts[a](1) - pts[o](1)) * (pts[b](0) - pts[o](0));
    };
    std::vector<int> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], order[i]) <= tol * tol) --k;
        hull[k++] = order[i];
    }
    for (int i = n - 2, t = k + 1; i >= 0; --i) {
        while (k >= t && turn(hull[k - 2], hull[k - 1], order[i]) <= tol * tol) --k;
        hull[k++] = order[i];
    }
    hull.resize(std::max(k - 1, 0));
    std::vector<detail::LocalFacet> facets;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec& a = pts[hull[i]];
        const Vec& b = pts[hull[(i + 1) % hull.size()]];
        Vec nrm(2);
        nrm << (b(1) - a(1)), -(b(0) - a(0));
        nrm.normalize();
        const double off = nrm.dot(a);
        std::vector<int> on;
        for (int j = 0; j < n; ++j)
            if (std::abs(nrm.dot(pts[j]) - off) <= tol) on.push_back(j);
        facets.push_back({nrm, off, std::move(on)});
    }
    return facets;
}

std::vector<Vec> dedupe(std::span<const Vec> points, double tol) {
    std::vector<Vec> out;
    for (const Vec& p : points) {
        bool dup = false;
        for (const Vec& q : out)
            if ((p - q).lpNorm<Eigen::Infinity>() <= tol) { dup = true; break; }
        if (!dup) out.push_back(p);
    }
    return out;
}

std::vector<Vec> dedupe_sorted(std::span<const Vec> points, double tol) {
    // Sort by first coordinate to keep deduplication near-linear for large inputs.
    std::vector<int> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return points[a](0) < points[b](0); });
    std::vector<char> drop(points.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (drop[order[i]]) continue;
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (points[order[j]](0) - points[order[i]](0) > tol) break;
            if ((points[order[j]] - points[order[i]]).lpNorm<Eigen::Infinity>() <= tol) drop[order[j]] = 1;
        }
    }
    std::vector<Vec> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (!drop[i]) out.push_back(points[i]);
    return out;
}

} // namespace

Polytope build_polytope(int n, std::vector<Vec> vertices, std::vector<Facet> facets, Mat basis, Vec centroid) {
    Polytope p;
    p.ambient_dim_ = n;
    p.vertices_ = std::move(vertices);
    p.facets_ = std::move(facets);
    p.direction_basis_ = std::move(basis);
    p.normal_space_ = orthogonal_complement(p.direction_basis_, n);
    p.centroid_ = std::move(centroid);
    return p;
}

Polytope convex_hull(const std::vector<Vec>& points) { return convex_hull(std::span<const Vec>(points)); }

Polytope convex_hull(std::span<const Vec> points) {
    if (points.empty()) throw ValidationError("convex_hull: empty input");
    const auto n = points.front().size();
    if (n < 1) throw ValidationError("convex_hull: zero-dimensional points");
    for (const Vec& p : points) {
        if (p.size() != n) throw ValidationError("convex_hull: dimension mismatch");
        if (!p.allFinite()) throw ValidationError("convex_hull: non-finite coordinate");
    }
    const std::vector<Vec> pts = points.size() > 200 ? dedupe_sorted(points, kTol) : dedupe(points, kTol);

    Vec centre = Vec::Zero(n);
    for (const Vec& p : pts) centre += p;
    centre /= static_cast<double>(pts.size());
    Mat diffs(n, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) diffs.col(static_cast<Eigen::Index>(i)) = pts[i] - centre;
    const Mat basis = orthonormal_basis(diffs, kTol);
    const int d = static_cast<int>(basis.cols());

    if (d == 0) return build_polytope(static_cast<int>(n), {centre}, {}, basis, centre);

    std::vector<Vec> local(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) local[i] = basis.transpose() * (pts[i] - centre);

    std::vector<detail::LocalFacet> lf;
    if (d == 1) {
        int lo = 0, hi = 0;
        for (int i = 0; i < static_cast<int>(local.size()); ++i) {
            if (local[i](0) < local[lo](0)) lo = i;
            if (local[i](0) > local[hi](0)) hi = i;
        }
        lf.push_back({-Vec::Ones(1), -local[lo](0), {lo}});
        lf.push_back({Vec::Ones(1), local[hi](0), {hi}});
    } else if (d == 2) {
        lf = monotone_chain_facets(local, kTol);
    } else if (d == 3 && local.size() > 40) {
        lf = detail::incremental_facets_3d(local, kTol);
    } else {
        lf = detail::bruteforce_facets(local, kTol);
    }

    // Extreme points: facet normals through the point span the direction space.
    std::vector<std::vector<int>> through(local.size());
    for (std::size_t f = 0; f < lf.size(); ++f)
        for (int i : lf[f].on) through[i].push_back(static_cast<int>(f));
    std::vector<int> new_id(local.size(), -1);
    std::vector<Vec> verts;
    for (std::size_t i = 0; i < local.size(); ++i) {
        if (static_cast<int>(through[i].size()) < d) continue;
        Mat normals(d, static_cast<Eigen::Index>(through[i].size()));
        for (std::size_t j = 0; j < through[i].size(); ++j) normals.col(static_cast<Eigen::Index>(j)) = lf[through[i][j]].normal;
        if (orthonormal_basis(normals, 1e-7).cols() == d) {
            new_id[i] = static_cast<int>(verts.size());
            verts.push_back(pts[i]);
        }
    }
    std::vector<Facet> facets;
    for (const auto& f : lf) {
        Facet out;
        out.normal = basis * f.normal;
        out.offset = f.offset + out.normal.dot(centre);
        for (int i : f.on)
            if (new_id[i] >= 0) out.vertex_ids.push_back(new_id[i]);
        std::sort(out.vertex_ids.begin(), out.vertex_ids.end());
        facets.push_back(std::move(out));
    }
    Vec centroid = Vec::Zero(n);
    for (const Vec& v : verts) centroid += v;
    centroid /= static_cast<double>(verts.size());
    return build_polytope(static_cast<int>(n), std::move(verts), std::move(facets), basis, centroid);
}

std::vector<std::vector<int>> Polytope::vertex_facet_incidence() const {
    std::vector<std::vector<int>> inc(vertices_.size());
    for (std::size_t f = 0; f < facets_.size(); ++f)
        for (int v : facets_[f].vertex_ids) inc[v].push_back(static_cast<int>(f));
    return inc;
}

bool Polytope::contains(const Vec& x, double tol) const {
    if (x.size() != ambient_dim_) throw ValidationError("Polytope::contains: dimension mismatch");
    const Vec rel = x - centroid_;
    if (normal_space_.cols() > 0 && (normal_space_.transpose() * rel).norm() > tol) return false;
    for (const Facet& f : facets_)
        if (f.normal.dot(x) > f.offset + tol) return false;
    return true;
}

double Polytope::support(const Vec& u) const {
    double best = -1e300;
    for (const Vec& v : vertices_) best = std::max(best, u.dot(v));
    return best;
}

Polytope Polytope::translated(const Vec& t) const {
    std::vector<Vec> pts;
    for (const Vec& v : vertices_) pts.push_back(v + t);
    return convex_hull(pts);
}

Polytope Polytope::scaled(double s) const {
    std::vector<Vec> pts;
    for (const Vec& v : vertices_) pts.push_back(s * v);
    return convex_hull(pts);
}

Polytope Polytope::transformed(const Mat& linear) const {
    std::vector<Vec> pts;
    for (const Vec& v : vertices_) pts.push_back(linear * v);
    return convex_hull(pts);
}

nlohmann::json Polytope::to_json() const {
    nlohmann::json j;
    j["dim"] = ambient_dim_;
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (const Vec& v : vertices_) vs.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    return j;
}

Polytope hrep_polytope(std::span<const Vec> xi, std::span<const double> y) {
    if (xi.empty()) throw ValidationError("hrep_polytope: no constraints");
    if (xi.size() != y.size()) throw ValidationError("hrep_polytope: xi and y differ in length");
    const auto n = xi.front().size();
    for (const Vec& c : xi)
        if (c.size() != n) throw ValidationError("hrep_polytope: dimension mismatch");
    const int s = static_cast<int>(xi.size());

    Mat rows(s, n);
    for (int i = 0; i < s; ++i) rows.row(i) = xi[i].transpose();
    // Reduce to the row space; a non-trivial null space makes any non-empty set unbounded.
    const Mat row_basis = orthonormal_basis(rows.transpose(), kTol);
    const int r = static_cast<int>(row_basis.cols());
    const Mat reduced = rows * row_basis;  // s x r

    auto feasible = [&](const Vec& z) {
        for (int i = 0; i < s; ++i)
            if (reduced.row(i).dot(z) > y[i] + 1e-9 * std::max(1.0, std::abs(y[i]))) return false;
        return true;
    };
    std::vector<Vec> verts;
    detail::for_each_combination(s, r, [&](const std::vector<int>& idx) {
        Mat a(r, r);
        Vec b(r);
        for (int i = 0; i < r; ++i) {
            a.row(i) = reduced.row(idx[i]);
            b(i) = y[idx[i]];
        }
        Eigen::FullPivLU<Mat> lu(a);
        if (lu.rank() < r) return true;
        const Vec z = lu.solve(b);
        if (feasible(z)) verts.push_back(row_basis * z);
        return true;
    });
    if (verts.empty()) throw EmptyPolytopeError("hrep_polytope: feasible set is empty");
    if (r < static_cast<int>(n)) throw UnboundedPolytopeError("hrep_polytope: constraints do not bound all directions");

    // Recession cone {d : xi_i . d <= 0} must be trivial; its extreme rays come from (n-1)-subsets.
    bool unbounded = false;
    detail::for_each_combination(s, static_cast<int>(n) - 1, [&](const std::vector<int>& idx) {
        Mat a(static_cast<Eigen::Index>(idx.size()), n);
        for (std::size_t i = 0; i < idx.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows.row(idx[i]);
        Vec d;
        if (idx.empty()) {
            d = Vec::Unit(n, 0);
        } else {
            Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
            const auto& sv = svd.singularValues();
            if (sv.size() < static_cast<Eigen::Index>(n) - 1 || sv(static_cast<Eigen::Index>(n) - 2) <= kTol) return true;
            d = svd.matrixV().col(static_cast<Eigen::Index>(n) - 1);
        }
        for (double sign : {1.0, -1.0}) {
            bool ray = true;
            for (int i = 0; i < s; ++i)
                if (sign * rows.row(i).dot(d) > kTol) { ray = false; break; }
            if (ray) { unbounded = true; return false; }
        }
        return true;
    });
    if (unbounded) throw UnboundedPolytopeError("hrep_polytope: feasible set is unbounded");
    return convex_hull(verts);
}

Polytope unit_cube(int n) {
    if (n < 1) throw ValidationError("unit_cube: n must be positive");
    std::vector<Vec> pts;
    for (int mask = 0; mask < (1 << n); ++mask) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = (mask >> i) & 1;
        pts.push_back(v);
    }
    return convex_hull(pts);
}

Polytope box(std::span<const double> sides) {
    const int n = static_cast<int>(sides.size());
    if (n < 1) throw ValidationError("box: no sides");
    std::vector<Vec> pts;
    for (int mask = 0; mask < (1 << n); ++mask) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = ((mask >> i) & 1) ? sides[i] : 0.0;
        pts.push_back(v);
    }
    return convex_hull(pts);
}

Polytope standard_simplex(int n) {
    std::vector<Vec> pts{Vec::Zero(n)};
    for (int i = 0; i < n; ++i) pts.push_back(Vec::Unit(n, i));
    return convex_hull(pts);
}

namespace {

Vec to_vec(const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

Polytope polytope_from_json(const nlohmann::json& j) {
    try {
        if (j.contains("preset")) {
            const std::string preset = j.at("preset").get<std::string>();
            const int dim = j.value("dim", 3);
            if (preset == "cube") return unit_cube(dim);
            if (preset == "simplex") return standard_simplex(dim);
            if (preset == "box") {
                const auto sides = j.at("sides").get<std::vector<double>>();
                return box(sides);
            }
            if (preset == "point") {
                Vec at = j.contains("at") ? to_vec(j.at("at")) : Vec::Zero(dim);
                return convex_hull(std::vector<Vec>{at});
            }
            throw ValidationError("unknown polytope preset '" + preset + "'");
        }
        if (j.contains("hrep")) {
            std::vector<Vec> xi;
            for (const auto& row : j.at("hrep").at("xi")) xi.push_back(to_vec(row));
            const auto y = j.at("hrep").at("y").get<std::vector<double>>();
            return hrep_polytope(xi, y);
        }
        const int dim = j.at("dim").get<int>();
        std::vector<Vec> pts;
        for (const auto& row : j.at("vertices")) {
            Vec v = to_vec(row);
            if (v.size() != dim) throw ValidationError("polytope json: vertex dimension differs from 'dim'");
            pts.push_back(std::move(v));
        }
        return convex_hull(pts);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("polytope json: ") + e.what());
    }
}

} // namespace valab
