#include "valab/kernels.hpp"

#include <cmath>

#include "valab/error.hpp"
#include "valab/faces.hpp"
#include "valab/quadrature.hpp"

namespace valab {

namespace {

void check_degree(int n, int k) {
    if (n < 2 || k < 1 || k > n - 1) throw ValidationError("kernel needs 1 <= k <= n-1 and n >= 2");
}

std::vector<double> as_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec unit_normal_draw(int n, Rng& rng) { return random_unit(n, rng); }

} // namespace

std::pair<Mat, Vec> random_flag(int n, int k, Rng& rng) {
    const Mat e = random_frame(n, k, rng);
    Vec l;
    do {
        l = random_unit(n, rng);
        l -= e * (e.transpose() * l);
    } while (l.norm() < 1e-6);
    return {e, l.normalized()};
}

Kernel constant_kernel(int n, int k, double value) {
    check_degree(n, k);
    Kernel f{n, k, [value](const Mat&, const Vec&) { return value; }, "constant", {}};
    f.spec = {{"kind", "constant"}, {"params", {{"n", n}, {"k", k}, {"value", value}}}};
    return f;
}

Kernel separable_kernel(int n, int k, std::uint64_t seed, const SeparableOptions& opts) {
    check_degree(n, k);
    if (opts.terms < 0) throw ValidationError("separable kernel: terms must be >= 0");
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    std::normal_distribution<double> normal;
    struct Term {
        double a, b;
        Vec u, w;
    };
    const double c0 = opts.centered ? 0.0 : unif(rng);
    std::vector<Term> terms;
    for (int j = 0; j < opts.terms; ++j) {
        Term t;
        t.a = opts.scale * normal(rng);
        t.b = opts.scale * normal(rng);
        t.u = unit_normal_draw(n, rng);
        t.w = unit_normal_draw(n, rng);
        terms.push_back(std::move(t));
    }
    const double g = opts.scale * normal(rng);
    const Vec v = unit_normal_draw(n, rng);
    const bool centered = opts.centered;
    const double q = n - k;

    Kernel f;
    f.n = n;
    f.k = k;
    f.fn = [=](const Mat& e, const Vec& l) {
        double s = c0;
        for (const Term& t : terms) {
            const double weight = t.a + t.b * (e.transpose() * t.u).squaredNorm();
            double lw = l.dot(t.w);
            lw *= lw;
            if (centered) lw -= (1.0 - (e.transpose() * t.w).squaredNorm()) / q;
            s += weight * lw;
        }
        double lv = l.dot(v);
        lv = lv * lv * lv * lv;
        if (centered) {
            const double sv = 1.0 - (e.transpose() * v).squaredNorm();
            lv -= 3.0 * sv * sv / (q * (q + 2.0));
        }
        return s + g * lv;
    };
    f.label = std::string(centered ? "centered-" : "") + "separable(seed=" + std::to_string(seed) + ")";
    f.spec = {{"kind", "separable"},
              {"params",
               {{"n", n}, {"k", k}, {"seed", seed}, {"terms", opts.terms}, {"centered", centered}, {"scale", opts.scale}}}};
    return f;
}

GrassFunction smap(const Kernel& f) {
    GrassFunction h;
    h.n = f.n;
    h.k = f.k;
    h.label = "S(" + f.label + ")";
    h.fn = [f](const Mat& e) {
        const Mat perp = orthogonal_complement(e, f.n);
        return sphere_average(perp, [&](const Vec& l) { return f(e, l); }, SphereOrders{32, 256, false});
    };
    return h;
}

Kernel pullback(const GrassFunction& h) {
    Kernel f;
    f.n = h.n;
    f.k = h.k;
    f.fn = [h](const Mat& e, const Vec&) { return h(e); };
    f.label = "p*(" + h.label + ")";
    return f;
}

Kernel remove_fiber_mean(const Kernel& f) {
    const GrassFunction s = smap(f);
    Kernel g;
    g.n = f.n;
    g.k = f.k;
    g.fn = [f, s](const Mat& e, const Vec& l) { return f(e, l) - s(e); };
    g.label = f.label + " - p*S(" + f.label + ")";
    g.spec = f.spec;
    return g;
}

nlohmann::json Lemma18Kernel::report() const {
    return {{"edge_length", edge_length}, {"arc_width", arc_width},       {"arc_integral", arc_integral},
            {"predicted_phi", predicted_phi}, {"measured_phi", measured_phi}, {"smap_sup", smap_sup},
            {"smap_samples", smap_samples}};
}

Lemma18Kernel lemma18_kernel(const Polytope& simplex, const Lemma18Options& opts) {
    if (simplex.ambient_dim() != 3 || simplex.affine_dim() != 3 || simplex.vertices().size() != 4)
        throw ValidationError("lemma18 kernel: expected a full-dimensional simplex in R^3");
    if (opts.harmonic < 2 || opts.harmonic % 2 != 0)
        throw ValidationError("lemma18 kernel: profile harmonic must be even and >= 2 (zero mean, even in l)");
    if (!(opts.bump_width > 0.0) || opts.bump_width >= 0.5 * kPi)
        throw ValidationError("lemma18 kernel: bump_width must lie in (0, pi/2)");

    std::vector<int> ids{std::min(opts.va, opts.vb), std::max(opts.va, opts.vb)};
    const auto edges = enumerate_faces(simplex, 1);
    const Face* f1 = nullptr;
    for (const Face& e : edges)
        if (e.vertex_ids == ids) f1 = &e;
    if (f1 == nullptr || opts.va == opts.vb) throw ValidationError("lemma18 kernel: vertices do not span an edge");

    const Vec d1 = f1->dir_basis.col(0);
    for (const Face& e : edges) {
        if (&e == f1) continue;
        const double angle = std::acos(std::min(1.0, std::abs(e.dir_basis.col(0).dot(d1))));
        if (angle < opts.bump_width)
            throw ValidationError("lemma18 kernel: bump overlaps the direction of edge [" +
                                  std::to_string(e.vertex_ids[0]) + "," + std::to_string(e.vertex_ids[1]) + "]");
    }

    const NormalRegion r1 = exterior_angle(simplex, *f1);
    const double mid = r1.arc->start + 0.5 * r1.arc->width;
    const Vec d_ref = r1.perp_basis.col(0) * std::cos(mid) + r1.perp_basis.col(1) * std::sin(mid);
    const double half = 0.5 * r1.arc->width;
    const int h = opts.harmonic;
    const double theta0 = opts.phase.value_or(0.0);
    const double amp = opts.amplitude;
    const double width = opts.bump_width;

    Lemma18Kernel out;
    out.edge_length = f1->kvol;
    out.arc_width = r1.arc->width;
    out.arc_integral = (std::sin(h * (half - theta0)) + std::sin(h * (half + theta0))) / (2.0 * kPi * h);
    out.predicted_phi = out.edge_length * amp * out.arc_integral;
    if (amp != 0.0 && std::abs(out.arc_integral) < 1e-12)
        throw ValidationError("lemma18 kernel: profile integrates to zero over the edge's exterior arc");

    Kernel& f = out.kernel;
    f.n = 3;
    f.k = 1;
    f.fn = [=](const Mat& e, const Vec& l) {
        if (amp == 0.0) return 0.0;
        Vec ep = e.col(0);
        const double c = ep.dot(d1);
        const double alpha = std::acos(std::min(1.0, std::abs(c)));
        if (alpha >= width) return 0.0;
        const double t = alpha / width;
        const double bump = std::exp(1.0 - 1.0 / (1.0 - t * t));
        if (c < 0) ep = -ep;
        const Vec u = (d_ref - d_ref.dot(ep) * ep).normalized();
        const Vec v = cross3(ep, u);
        const double theta = std::atan2(l.dot(v), l.dot(u));
        return amp * bump * std::cos(h * (theta - theta0));
    };
    f.label = "lemma18(edge=[" + std::to_string(ids[0]) + "," + std::to_string(ids[1]) + "],h=" + std::to_string(h) + ")";
    nlohmann::json params = {{"polytope", simplex.to_json()},
                             {"edge", {opts.va, opts.vb}},
                             {"harmonic", h},
                             {"amplitude", amp},
                             {"bump_width", width}};
    params["phase"] = opts.phase ? nlohmann::json(*opts.phase) : nlohmann::json("auto");
    f.spec = {{"kind", "lemma18"}, {"params", params}};

    std::vector<double> terms;
    for (const Face& e : edges) terms.push_back(e.kvol * integrate_kernel_over_region(f, e, exterior_angle(simplex, e)).value);
    out.measured_phi = pairwise_sum(terms);

    // S(f) on random lines and on lines inside the bump, where f is nonzero
    const GrassFunction s = smap(f);
    Rng rng(18);
    for (int i = 0; i < 200; ++i) {
        Vec e = random_unit(3, rng);
        if (i % 2 == 1) {
            const Vec perturb = random_unit(3, rng);
            e = (d1 + std::tan(width * (i % 17) / 17.0) * (perturb - perturb.dot(d1) * d1).normalized()).normalized();
        }
        out.smap_sup = std::max(out.smap_sup, std::abs(s(Mat(e))));
    }
    out.smap_samples = 200;
    return out;
}

SphereForm round_form() {
    SphereForm w;
    w.matrix = [](const Vec& m) {
        // A v = v x m
        Mat a(3, 3);
        a << 0, m(2), -m(1), -m(2), 0, m(0), m(1), -m(0), 0;
        return a;
    };
    w.spec = {{"preset", "round"}};
    return w;
}

SphereForm zero_form() {
    SphereForm w;
    w.matrix = [](const Vec&) { return Mat(Mat::Zero(3, 3)); };
    w.spec = {{"preset", "zero"}};
    return w;
}

SphereForm random_form(std::uint64_t seed, double scale) {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    auto draw = [&] {
        Mat m(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = scale * normal(rng);
        return m;
    };
    std::array<Mat, 3> c{draw(), draw(), draw()};
    std::array<Mat, 3> d{draw(), draw(), draw()};
    Mat q = draw();
    q = 0.5 * (q + q.transpose()) / std::max(scale, 1e-300);
    SphereForm w;
    w.matrix = [c, d, q](const Vec& m) {
        Mat a = m(0) * c[0] + m(1) * c[1] + m(2) * c[2];
        a += (m.dot(q * m)) * (m(0) * d[0] + m(1) * d[1] + m(2) * d[2]);
        return a;
    };
    w.spec = {{"preset", "random"}, {"seed", seed}, {"scale", scale}};
    return w;
}

SphereForm combine_forms(double a, const SphereForm& x, double b, const SphereForm& y) {
    SphereForm w;
    w.matrix = [a, b, fx = x.matrix, fy = y.matrix](const Vec& m) { return Mat(a * fx(m) + b * fy(m)); };
    w.spec = {{"preset", "combination"}, {"a", a}, {"x", x.spec}, {"b", b}, {"y", y.spec}};
    return w;
}

Kernel chform_kernel(const SphereForm& omega) {
    auto raw = [m = omega.matrix](const Vec& e, const Vec& l) { return cross3(e, l).dot(m(l) * e); };
    auto values = [raw](const Vec& e, const Vec& l) {
        return std::array<double, 4>{raw(e, l), raw(-e, l), raw(e, -l), raw(-e, -l)};
    };

    // Construction-time parity check on a fixed sample.
    Rng rng(2024);
    bool any_raw = false, any_sym = false;
    for (int i = 0; i < 32; ++i) {
        const auto [e, l] = random_flag(3, 1, rng);
        const auto v = values(e.col(0), l);
        const double mean = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        for (double x : v) {
            if (std::abs(std::abs(x) - std::abs(v[0])) > 1e-9 * (1.0 + std::abs(v[0])))
                throw ValidationError("chform kernel: parity violation (sign choices disagree in absolute value)");
            if (std::abs(x) > 1e-12) any_raw = true;
        }
        if (std::abs(mean) > 1e-12) any_sym = true;
    }
    if (any_raw && !any_sym) throw ValidationError("chform kernel: sign symmetrization vanishes identically");

    Kernel f;
    f.n = 3;
    f.k = 1;
    f.fn = [values](const Mat& e, const Vec& l) {
        const auto v = values(e.col(0), l);
        return 0.25 * ((v[0] + v[1]) + (v[2] + v[3]));
    };
    f.label = "chform(" + omega.convention + "," + omega.spec.value("preset", std::string("custom")) + ")";
    f.spec = {{"kind", "chform"}, {"params", omega.spec}};
    return f;
}

Kernel restrict_kernel(const Kernel& f, const Mat& w, double kappa) {
    if (f.k != 1 || f.n < 4) throw ValidationError("restrict_kernel: needs a kernel on G_1(R^n) with n >= 4");
    if (w.rows() != f.n || w.cols() != 3) throw ValidationError("restrict_kernel: W must be an n x 3 basis");
    if ((w.transpose() * w - Mat::Identity(3, 3)).norm() > 1e-9) throw ValidationError("restrict_kernel: W must be orthonormal");
    const Mat w_perp = orthogonal_complement(w, f.n);
    Kernel g;
    g.n = 3;
    g.k = 1;
    g.fn = [f, w, w_perp, kappa](const Mat& e, const Vec& l) {
        if (e.rows() != 3 || l.size() != 3) throw ValidationError("restricted kernel: arguments must be given in W coordinates");
        if (std::abs(e.col(0).dot(l)) > 1e-8) throw ValidationError("restricted kernel: l is not orthogonal to E");
        const Mat e_amb = w * e;
        Mat basis(f.n, 1 + w_perp.cols());
        basis << (w * l).normalized(), w_perp;
        const Vec lhat = basis.col(0);
        const double avg = sphere_average(
            basis, [&](const Vec& m) { return f(e_amb, m) * std::abs(m.dot(lhat)); }, SphereOrders{24, 64, true});
        return kappa * avg;
    };
    g.label = "restricted(" + f.label + ")";
    nlohmann::json wj = nlohmann::json::array();
    for (int c = 0; c < 3; ++c) wj.push_back(as_std(w.col(c)));
    g.spec = {{"kind", "restricted"}, {"params", {{"base", f.spec}, {"W", wj}, {"kappa", kappa}}}};
    return g;
}

KappaEstimate calibrate_kappa(int n) {
    if (n < 4) throw ValidationError("calibrate_kappa: n must be >= 4");
    const Mat basis = Mat::Identity(n - 2, n - 2);
    auto h = [](const Vec& m) { return std::abs(m(0)); };
    const double fine = sphere_average(basis, h, SphereOrders{32, 96, true});
    const double coarse = sphere_average(basis, h, SphereOrders{24, 64, true});
    return {1.0 / fine, std::abs(1.0 / fine - 1.0 / coarse)};
}

namespace {

Mat json_matrix_columns(const nlohmann::json& j, int n) {
    Mat m(n, static_cast<Eigen::Index>(j.size()));
    for (std::size_t c = 0; c < j.size(); ++c) {
        const auto v = j[c].get<std::vector<double>>();
        if (static_cast<int>(v.size()) != n) throw ValidationError("basis vector has the wrong dimension");
        m.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Vec>(v.data(), n);
    }
    return m;
}

} // namespace

Kernel kernel_from_json(const nlohmann::json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        const nlohmann::json p = j.value("params", nlohmann::json::object());
        if (kind == "constant") return constant_kernel(p.value("n", 3), p.value("k", 1), p.value("value", 1.0));
        if (kind == "separable") {
            SeparableOptions o;
            o.terms = p.value("terms", o.terms);
            o.centered = p.value("centered", o.centered);
            o.scale = p.value("scale", o.scale);
            return separable_kernel(p.value("n", 3), p.value("k", 1), p.value("seed", std::uint64_t{1}), o);
        }
        if (kind == "lemma18") {
            const Polytope s = p.contains("polytope") ? polytope_from_json(p.at("polytope")) : standard_simplex(3);
            Lemma18Options o;
            const auto edge = p.value("edge", std::vector<int>{0, 1});
            if (edge.size() != 2) throw ValidationError("lemma18: 'edge' must list two vertex ids");
            o.va = edge[0];
            o.vb = edge[1];
            o.harmonic = p.value("harmonic", o.harmonic);
            o.amplitude = p.value("amplitude", o.amplitude);
            o.bump_width = p.value("bump_width", o.bump_width);
            if (p.contains("phase") && p.at("phase").is_number()) o.phase = p.at("phase").get<double>();
            return lemma18_kernel(s, o).kernel;
        }
        if (kind == "chform") {
            const std::string preset = p.value("preset", std::string("random"));
            if (preset == "round") return chform_kernel(round_form());
            if (preset == "zero") return chform_kernel(zero_form());
            if (preset == "random") return chform_kernel(random_form(p.value("seed", std::uint64_t{1}), p.value("scale", 1.0)));
            throw ValidationError("chform: unknown preset '" + preset + "'");
        }
        if (kind == "restricted") {
            const Kernel base = kernel_from_json(p.at("base"));
            const Mat w = p.contains("W") ? json_matrix_columns(p.at("W"), base.n) : Mat(Mat::Identity(base.n, 3));
            double kappa;
            if (p.contains("kappa") && p.at("kappa").is_number()) kappa = p.at("kappa").get<double>();
            else kappa = calibrate_kappa(base.n).value;
            return restrict_kernel(base, orthonormal_basis(w), kappa);
        }
        throw ValidationError("unknown kernel kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("kernel json: ") + e.what());
    }
}

nlohmann::json KernelCheck::to_json() const {
    return {{"evenness", evenness}, {"basis_invariance", basis_invariance}, {"lipschitz", lipschitz},
            {"samples", samples},   {"ok", ok}};
}

KernelCheck check_kernel(const Kernel& f, int samples, std::uint64_t seed) {
    Rng rng(seed);
    KernelCheck c;
    c.samples = samples;
    bool finite = true, within = true;
    const double eps = 1e-5;
    for (int i = 0; i < samples; ++i) {
        const auto [e, l] = random_flag(f.n, f.k, rng);
        const double v = f(e, l);
        const double odd = std::abs(v - f(e, -l));
        const Mat e2 = f.k == 1 ? Mat(-e) : Mat(e * random_orthogonal(f.k, rng));
        const double basis = std::abs(v - f(e2, l));
        Vec t = random_unit(f.n, rng);
        t -= e * (e.transpose() * t) + t.dot(l) * l;
        const Vec l2 = (l + eps * t.normalized()).normalized();
        const double slope = std::abs(f(e, l2) - v) / (l2 - l).norm();
        finite = finite && std::isfinite(v) && std::isfinite(slope);
        within = within && odd <= 1e-9 * (1.0 + std::abs(v)) && basis <= 1e-9 * (1.0 + std::abs(v));
        c.evenness = std::max(c.evenness, odd);
        c.basis_invariance = std::max(c.basis_invariance, basis);
        c.lipschitz = std::max(c.lipschitz, slope);
    }
    c.ok = finite && within;
    return c;
}

} // namespace valab
