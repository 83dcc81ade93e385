#include "valab/valuation.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "valab/error.hpp"
#include "valab/parallel.hpp"
#include "valab/quadrature.hpp"

namespace valab {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

nlohmann::json ValuationResult::to_json() const {
    nlohmann::json t = nlohmann::json::array();
    for (const FaceTerm& f : terms)
        t.push_back({{"face_id", f.face_id},
                     {"vertex_ids", f.vertex_ids},
                     {"kvol", f.kvol},
                     {"inner", f.inner},
                     {"inner_error", f.inner_error},
                     {"contribution", f.contribution}});
    return {{"k", k},           {"value", value},     {"error_estimate", error_estimate},
            {"method", to_string(method)}, {"samples", samples}, {"seed", seed},
            {"face_count", terms.size()}, {"terms", t}};
}

std::string ValuationResult::to_csv() const {
    std::ostringstream out;
    out << "face_id,k,kvol,inner,inner_error,contribution\n";
    for (const FaceTerm& f : terms)
        out << f.face_id << ',' << k << ',' << num(f.kvol) << ',' << num(f.inner) << ',' << num(f.inner_error) << ','
            << num(f.contribution) << '\n';
    return out.str();
}

ValuationResult phi(const Kernel& f, const Polytope& p, const PhiOptions& opts) {
    f.require_dims(p.ambient_dim(), f.k);
    const std::vector<Face> faces = enumerate_faces(p, f.k);
    std::vector<Estimate> inner(faces.size());
    parallel_for(faces.size(), [&](std::size_t i) {
        const NormalRegion r = exterior_angle(p, faces[i]);
        inner[i] = integrate_kernel_over_region(f, faces[i], r, opts.method, opts.samples, derive_seed(opts.seed, i));
    });

    ValuationResult res;
    res.k = f.k;
    res.seed = opts.seed;
    std::vector<double> contributions;
    double exact_err = 0.0, mc_var = 0.0;
    bool any_exact = false, any_mc = false;
    for (std::size_t i = 0; i < faces.size(); ++i) {
        FaceTerm t;
        t.face_id = static_cast<int>(i);
        t.vertex_ids = faces[i].vertex_ids;
        t.kvol = faces[i].kvol;
        t.inner = inner[i].value;
        t.inner_error = inner[i].error;
        t.contribution = t.kvol * t.inner;
        contributions.push_back(t.contribution);
        if (inner[i].method == Method::MC) {
            any_mc = true;
            mc_var += std::pow(t.kvol * t.inner_error, 2);
            res.samples += inner[i].samples;
        } else {
            any_exact = true;
            exact_err += t.kvol * t.inner_error;
        }
        res.terms.push_back(std::move(t));
    }
    res.value = pairwise_sum(contributions);
    res.error_estimate = exact_err + std::sqrt(mc_var);
    res.method = any_mc && any_exact ? Method::Auto : (any_mc ? Method::MC : Method::Exact);
    return res;
}

ValuationResult intrinsic_volume(const Polytope& p, int k, const PhiOptions& opts) {
    const int n = p.ambient_dim();
    if (k < 1 || k > n - 1) throw ValidationError("intrinsic_volume: k must satisfy 1 <= k <= n-1");
    return phi(Kernel{n, k, [](const Mat&, const Vec&) { return 1.0; }, "constant", {}}, p, opts);
}

double klain_function(const Kernel& f, const Mat& e) {
    if (e.rows() != f.n || e.cols() != f.k) throw ValidationError("klain_function: E must be an n x k basis");
    if ((e.transpose() * e - Mat::Identity(f.k, f.k)).norm() > 1e-9) throw ValidationError("klain_function: E must be orthonormal");
    std::vector<Vec> pts;
    for (int mask = 0; mask < (1 << f.k); ++mask) {
        Vec v = Vec::Zero(f.n);
        for (int i = 0; i < f.k; ++i)
            if ((mask >> i) & 1) v += e.col(i);
        pts.push_back(v);
    }
    return phi(f, convex_hull(pts)).value;
}

Estimate ball_normal_cycle_value(const Kernel& f, double radius) {
    if (f.n != 3 || f.k != 1) throw ValidationError("ball_normal_cycle_value: only n = 3, k = 1");
    if (radius < 0) throw ValidationError("ball_normal_cycle_value: negative radius");
    auto average = [&](int polar, int azimuth) {
        const SphereGrid g = make_sphere_grid(polar, azimuth);
        std::vector<double> terms(g.points.size());
        parallel_for(g.points.size(), [&](std::size_t i) {
            const Vec& l = g.points[i];
            const Mat t = orthogonal_complement(Mat(l), 3);
            terms[i] = g.weights[i] * (f(Mat(t.col(0)), l) + f(Mat(t.col(1)), l));
        });
        return 2.0 * radius * pairwise_sum(terms);
    };
    const double fine = average(48, 96);
    const double coarse = average(32, 64);
    return {fine, std::abs(fine - coarse), Method::Exact, 0};
}

Extrapolation parse_extrapolation(const std::string& s) {
    if (s == "none") return Extrapolation::None;
    if (s == "richardson") return Extrapolation::Richardson;
    throw ValidationError("unknown extrapolation '" + s + "' (expected none or richardson)");
}

std::vector<int> default_members(const std::string& family, int m_max) {
    int start = 1;
    if (family == "uv_ball") start = 4;
    if (family == "ball") start = 16;
    std::vector<int> out;
    for (int m = start; m <= m_max; m *= 2) out.push_back(m);
    if (out.empty()) throw ValidationError("m_max is below the smallest member of family '" + family + "'");
    return out;
}

namespace {

struct LinearFit {
    double intercept = 0.0;
    double prop_error = 0.0;  // from member error bars
    double resid_error = 0.0; // from the fit residuals
};

LinearFit fit_line(const std::vector<ProbeSample>& s, std::size_t first) {
    const std::size_t n = s.size() - first;
    Mat x(n, 2);
    Vec y(n), sig(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = s[first + i].d_hausdorff;
        y(i) = s[first + i].phi;
        sig(i) = s[first + i].error;
    }
    const Mat xtx_inv = (x.transpose() * x).inverse();
    const Mat a = xtx_inv * x.transpose();
    const Vec beta = a * y;
    LinearFit f;
    f.intercept = beta(0);
    f.prop_error = std::sqrt(a.row(0).cwiseProduct(sig.transpose()).squaredNorm());
    if (n > 2) {
        const double rss = (y - x * beta).squaredNorm();
        f.resid_error = std::sqrt(rss / static_cast<double>(n - 2) * xtx_inv(0, 0));
    }
    return f;
}

} // namespace

LimitEstimate extrapolate(const std::vector<ProbeSample>& s, Extrapolation how) {
    LimitEstimate out;
    out.diagnostics = nlohmann::json::object();
    const std::size_t n = s.size();
    if (n < 2) throw ValidationError("extrapolation needs at least two sequence members");

    // tail monotonicity over the last four members, ignoring steps inside the noise
    const std::size_t first = n >= 4 ? n - 4 : 0;
    int sign = 0;
    for (std::size_t i = first; i + 1 < n; ++i) {
        const double diff = s[i + 1].phi - s[i].phi;
        const double noise = 3.0 * (s[i].error + s[i + 1].error) + 1e-12 * (1.0 + std::abs(s[i].phi));
        if (std::abs(diff) <= noise) continue;
        const int sg = diff > 0 ? 1 : -1;
        if (sign != 0 && sg != sign) out.monotone_tail = false;
        sign = sg;
    }
    out.diagnostics["monotone_tail"] = out.monotone_tail;

    if (how == Extrapolation::None || n < 3) {
        out.value = s.back().phi;
        out.uncertainty = std::max(s.back().error, std::abs(s.back().phi - s[n - 2].phi));
        out.diagnostics["method"] = "last member";
        return out;
    }
    const LinearFit f4 = fit_line(s, first);
    const LinearFit f3 = fit_line(s, n - 3);
    out.value = f4.intercept;
    out.uncertainty = std::max({f4.prop_error, f4.resid_error, std::abs(f4.intercept - f3.intercept)});
    out.diagnostics["method"] = "linear fit in d_H over the last " + std::to_string(n - first) + " members";
    out.diagnostics["assumption"] = "first-order convergence in the Hausdorff distance";
    out.diagnostics["fit_last3"] = f3.intercept;
    out.diagnostics["propagated_error"] = f4.prop_error;
    out.diagnostics["residual_error"] = f4.resid_error;
    return out;
}

nlohmann::json ProbeReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const ProbeSample& p : samples)
        rows.push_back({{"m", p.m}, {"d_hausdorff", p.d_hausdorff}, {"phi", p.phi}, {"error", p.error}, {"vertices", p.vertices}});
    nlohmann::json j = {{"kernel", kernel_spec},
                        {"family", family_spec},
                        {"samples", rows},
                        {"extrapolation", extrapolation},
                        {"extrapolated_limit", limit.value},
                        {"limit_uncertainty", limit.uncertainty},
                        {"limit_diagnostics", limit.diagnostics},
                        {"phi_at_limit_body", phi_at_limit},
                        {"phi_at_limit_uncertainty", phi_at_limit_uncertainty},
                        {"reference_source", reference_source},
                        {"combined_uncertainty", combined_uncertainty},
                        {"margin", margin},
                        {"verdict", verdict}};
    if (!reference_family.is_null()) j["reference_family"] = reference_family;
    return j;
}

std::string ProbeReport::to_csv() const {
    std::ostringstream out;
    out << "m,d_hausdorff,phi,error,vertices\n";
    for (const ProbeSample& p : samples)
        out << p.m << ',' << num(p.d_hausdorff) << ',' << num(p.phi) << ',' << num(p.error) << ',' << p.vertices << '\n';
    return out.str();
}

ProbeReport continuity_probe(const Kernel& f, const PolytopeSequence& seq, const ProbeOptions& opts) {
    const std::vector<int> members = opts.members.empty() ? default_members(seq.family(), 64) : opts.members;
    if (members.size() < 2) throw ValidationError("continuity_probe: need at least two members");
    const bool ball_limit = std::holds_alternative<Ball>(seq.limit());
    const bool use_reference = ball_limit && opts.reference.has_value();

    const std::size_t count = members.size();
    std::vector<ProbeSample> main(count), ref(use_reference ? count : 0);
    parallel_for(count * (use_reference ? 2 : 1), [&](std::size_t job) {
        const bool is_ref = job >= count;
        const std::size_t i = job % count;
        const PolytopeSequence& s = is_ref ? *opts.reference : seq;
        const Polytope p = s.member(members[i]);
        PhiOptions po = opts.phi;
        po.seed = derive_seed(opts.phi.seed, 2 * static_cast<std::uint64_t>(members[i]) + (is_ref ? 1 : 0));
        const ValuationResult v = phi(f, p, po);
        ProbeSample out{members[i], s.distance_to_limit(p), v.value, v.error_estimate, static_cast<int>(p.vertices().size())};
        (is_ref ? ref : main)[i] = out;
    });

    ProbeReport rep;
    rep.kernel_spec = f.spec.is_null() ? nlohmann::json(f.label) : f.spec;
    rep.family_spec = seq.spec();
    rep.samples = main;
    rep.extrapolation = opts.extrapolation == Extrapolation::None ? "none" : "richardson";
    rep.limit = extrapolate(main, opts.extrapolation);

    bool reference_ok = true;
    if (!ball_limit) {
        const ValuationResult v = phi(f, std::get<Polytope>(seq.limit()), opts.phi);
        rep.phi_at_limit = v.value;
        rep.phi_at_limit_uncertainty = v.error_estimate;
        rep.reference_source = "phi(limit body)";
    } else if (use_reference) {
        const LimitEstimate r = extrapolate(ref, opts.extrapolation);
        rep.phi_at_limit = r.value;
        rep.phi_at_limit_uncertainty = r.uncertainty;
        reference_ok = r.monotone_tail;
        rep.reference_source = "extrapolated limit of the reference sequence";
        rep.reference_family = opts.reference->spec();
    } else {
        const Estimate b = ball_normal_cycle_value(f, std::get<Ball>(seq.limit()).radius);
        rep.phi_at_limit = b.value;
        rep.phi_at_limit_uncertainty = b.error;
        rep.reference_source = "normal-cycle integral over the limit ball";
    }

    const double diff = std::abs(rep.limit.value - rep.phi_at_limit);
    rep.combined_uncertainty = std::max(std::hypot(rep.limit.uncertainty, rep.phi_at_limit_uncertainty),
                                        1e-9 * (1.0 + std::abs(rep.phi_at_limit)));
    rep.margin = diff / rep.combined_uncertainty;
    if (!rep.limit.monotone_tail || !reference_ok) rep.verdict = "inconclusive";
    else if (rep.margin < 3.0) rep.verdict = "converges-to-value";
    else if (rep.margin > 10.0) rep.verdict = "converges-elsewhere";
    else rep.verdict = "inconclusive";
    return rep;
}

nlohmann::json ScanReport::to_json() const {
    nlohmann::json s = nlohmann::json::array(), r = nlohmann::json::array();
    for (const auto& [t, v] : samples) s.push_back({{"t", t}, {"phi", v}});
    for (const auto& [w, j] : refinement) r.push_back({{"width", w}, {"jump", j}});
    return {{"samples", s},
            {"refinement", r},
            {"max_jump", max_jump},
            {"jump_location", jump_location},
            {"refined_jump", refined_jump},
            {"rate", rate ? nlohmann::json(*rate) : nlohmann::json(nullptr)},
            {"pass", pass}};
}

std::string ScanReport::to_csv() const {
    std::ostringstream out;
    out << "t,phi\n";
    for (const auto& [t, v] : samples) out << num(t) << ',' << num(v) << '\n';
    return out.str();
}

ScanReport weak_continuity_scan(const Kernel& f, std::span<const Vec> xi,
                                const std::function<std::vector<double>(double)>& path, const ScanOptions& opts) {
    if (opts.steps < 2 || !(opts.t1 > opts.t0)) throw ValidationError("weak_continuity_scan: need t1 > t0 and steps >= 2");
    auto value_at = [&](double t) {
        const std::vector<double> y = path(t);
        return phi(f, hrep_polytope(xi, y), opts.phi).value;
    };
    ScanReport rep;
    std::vector<double> ts(opts.steps + 1), vals(opts.steps + 1);
    for (int i = 0; i <= opts.steps; ++i) ts[i] = opts.t0 + (opts.t1 - opts.t0) * i / opts.steps;
    parallel_for(ts.size(), [&](std::size_t i) { vals[i] = value_at(ts[i]); });
    std::size_t worst = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) rep.samples.emplace_back(ts[i], vals[i]);
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        if (std::abs(vals[i + 1] - vals[i]) > std::abs(vals[worst + 1] - vals[worst])) worst = i;
    rep.max_jump = std::abs(vals[worst + 1] - vals[worst]);
    rep.jump_location = 0.5 * (ts[worst] + ts[worst + 1]);

    double a = ts[worst], b = ts[worst + 1], fa = vals[worst], fb = vals[worst + 1];
    rep.refinement.emplace_back(b - a, std::abs(fb - fa));
    for (int r = 0; r < opts.refinements; ++r) {
        const double mid = 0.5 * (a + b);
        const double fm = value_at(mid);
        if (std::abs(fm - fa) >= std::abs(fb - fm)) {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
        rep.refinement.emplace_back(b - a, std::abs(fb - fa));
    }
    rep.refined_jump = rep.refinement.back().second;

    std::vector<double> lx, ly;
    for (const auto& [w, j] : rep.refinement)
        if (j > 1e-14) {
            lx.push_back(std::log(w));
            ly.push_back(std::log(j));
        }
    if (lx.size() >= 2) {
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        rep.rate = sxy / sxx;
    }
    rep.pass = rep.refined_jump < opts.jump_tol && (!rep.rate || *rep.rate >= opts.min_rate);
    return rep;
}

} // namespace valab
