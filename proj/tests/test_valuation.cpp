#include <doctest.h>

#include <cmath>

#include "valab/error.hpp"
#include "valab/kernels.hpp"
#include "valab/valuation.hpp"

using namespace valab;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

// elementary symmetric polynomial e_k
double elementary(const std::vector<double>& a, int k) {
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (double x : a)
        for (int j = k; j >= 1; --j) e[j] += x * e[j - 1];
    return e[k];
}

Polytope box_at(double x0, double x1, double y1, double z1) {
    std::vector<Vec> pts;
    for (double x : {x0, x1})
        for (double y : {0.0, y1})
            for (double z : {0.0, z1}) pts.push_back(vec({x, y, z}));
    return convex_hull(pts);
}

} // namespace

TEST_CASE("intrinsic volumes of boxes and cubes") {
    CHECK(intrinsic_volume(unit_cube(3), 1).value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(intrinsic_volume(unit_cube(3), 2).value == doctest::Approx(3.0).epsilon(1e-12));
    for (std::vector<double> s : {std::vector<double>{1, 2, 3}, std::vector<double>{0.5, 0.5, 4}}) {
        const Polytope b = box(s);
        CHECK(std::abs(intrinsic_volume(b, 1).value - elementary(s, 1)) < 1e-9);
        CHECK(std::abs(intrinsic_volume(b, 2).value - elementary(s, 2)) < 1e-9);
    }
    const ValuationResult r = intrinsic_volume(unit_cube(3), 1);
    double sum = 0.0;
    for (const FaceTerm& t : r.terms) sum += t.contribution;
    CHECK(std::abs(sum - r.value) < 1e-12);
    CHECK(r.terms.size() == 12);
    CHECK(r.to_csv().rfind("face_id,k,kvol,inner,inner_error,contribution\n", 0) == 0);

    PhiOptions mc;
    mc.samples = 200000;
    mc.seed = 2;
    mc.method = Method::MC;
    CHECK(intrinsic_volume(unit_cube(4), 2).value == doctest::Approx(6.0).epsilon(1e-10));
    const ValuationResult v2 = intrinsic_volume(unit_cube(4), 2, mc);
    CHECK(std::abs(v2.value - 6.0) <= 3.0 * v2.error_estimate);
    CHECK(v2.method == Method::MC);

    const Polytope pt = convex_hull(std::vector<Vec>{vec({1, 2, 3})});
    CHECK(phi(constant_kernel(3, 1), pt).value == 0.0);
    CHECK_THROWS_AS(phi(constant_kernel(4, 1), unit_cube(3)), ValidationError);
}

TEST_CASE("ball normal-cycle value") {
    CHECK(ball_normal_cycle_value(constant_kernel(3, 1), 1.5).value == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(ball_normal_cycle_value(chform_kernel(round_form()), 2.0).value == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("Klain function equals S") {
    Rng rng(31);
    CHECK(klain_function(constant_kernel(3, 1), random_frame(3, 1, rng)) == doctest::Approx(1.0).epsilon(1e-12));
    for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 1}, {4, 2}, {4, 1}, {3, 2}}) {
        const Kernel f = separable_kernel(n, k, 40 + n + k);
        const GrassFunction s = smap(f);
        for (int i = 0; i < 4; ++i) {
            const Mat e = random_frame(n, k, rng);
            CHECK(std::abs(klain_function(f, e) - s(e)) < 1e-6);
        }
    }
    const Kernel l18 = lemma18_kernel(standard_simplex(3)).kernel;
    for (int i = 0; i < 4; ++i) CHECK(std::abs(klain_function(l18, random_frame(3, 1, rng))) < 1e-6);
}

TEST_CASE("valuation properties for random kernels") {
    Rng rng(5);
    const Kernel f = separable_kernel(3, 1, 77);
    const Kernel g = chform_kernel(random_form(9));
    const Kernel f2 = separable_kernel(3, 2, 78);
    const Polytope p = convex_hull(std::vector<Vec>{vec({0, 0, 0}), vec({1, 0.2, 0}), vec({0.1, 1, 0.3}),
                                                    vec({0.2, 0.3, 1}), vec({0.9, 0.8, 0.7})});
    for (const Kernel& k : {f, g, f2}) {
        const double base = phi(k, p).value;
        // translation invariance
        CHECK(std::abs(phi(k, p.translated(vec({0.3, -2.0, 1.7}))).value - base) < 1e-9);
        // evenness: phi(-P) = phi(P)
        CHECK(std::abs(phi(k, p.scaled(-1.0)).value - base) < 1e-9);
        // k-homogeneity
        for (double s : {0.5, 2.0}) CHECK(std::abs(phi(k, p.scaled(s)).value - std::pow(s, k.k) * base) < 1e-9 * (1 + std::abs(base)));
        // additivity on a box split: B = B1 u B2, B1 n B2 the common facet
        const Polytope b = box_at(0, 1, 0.7, 1.3), b1 = box_at(0, 0.4, 0.7, 1.3), b2 = box_at(0.4, 1, 0.7, 1.3);
        const Polytope mid = convex_hull(std::vector<Vec>{vec({0.4, 0, 0}), vec({0.4, 0.7, 0}), vec({0.4, 0, 1.3}), vec({0.4, 0.7, 1.3})});
        CHECK(std::abs(phi(k, b).value - (phi(k, b1).value + phi(k, b2).value - phi(k, mid).value)) < 1e-9);
    }
}

TEST_CASE("restriction compatibility in R^4") {
    Rng rng(12);
    const Mat w = random_frame(4, 3, rng);
    const Kernel f = separable_kernel(4, 1, 3);
    const Kernel g = restrict_kernel(f, w, calibrate_kappa(4).value);
    const Polytope p = standard_simplex(3);
    std::vector<Vec> lifted;
    for (const Vec& v : p.vertices()) lifted.push_back(w * v);
    PhiOptions mc;
    mc.samples = 100000;
    mc.seed = 8;
    const ValuationResult big = phi(f, convex_hull(lifted), mc);
    const ValuationResult small = phi(g, p);
    CHECK(std::abs(big.value - small.value) <= std::max(1e-2 * std::abs(big.value), 3.0 * big.error_estimate));
}

TEST_CASE("extrapolation") {
    std::vector<ProbeSample> s;
    for (int m : {1, 2, 4, 8}) s.push_back({m, 1.0 / m, 2.0 + 0.5 / m, 0.0, 0});
    const LimitEstimate e = extrapolate(s, Extrapolation::Richardson);
    CHECK(e.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(e.uncertainty < 1e-12);
    CHECK(e.monotone_tail);
    s[2].phi = 3.0;
    CHECK_FALSE(extrapolate(s, Extrapolation::Richardson).monotone_tail);
    const LimitEstimate last = extrapolate(s, Extrapolation::None);
    CHECK(last.value == s.back().phi);
}

TEST_CASE("continuity probes at a polytope limit") {
    const auto fam = bulge_family(standard_simplex(3), 0, 1);
    ProbeOptions o;
    o.members = {4, 8, 16, 32};
    const ProbeReport c = continuity_probe(constant_kernel(3, 1), fam, o);
    CHECK(c.verdict == "converges-to-value");
    CHECK(c.phi_at_limit == doctest::Approx(intrinsic_volume(standard_simplex(3), 1).value));
    CHECK(c.samples.size() == 4);
    CHECK(c.to_json()["samples"].size() == 4);
    CHECK(c.to_csv().rfind("m,d_hausdorff,phi,error,vertices\n", 0) == 0);
    const ProbeReport ch = continuity_probe(chform_kernel(random_form(4)), fam, o);
    CHECK(ch.verdict == "converges-to-value");
}

TEST_CASE("weak continuity across a vertex truncation") {
    std::vector<Vec> xi{vec({-1, 0, 0}), vec({0, -1, 0}), vec({0, 0, -1}), vec({1, 1, 1}), vec({1, 0, 0})};
    auto path = [](double t) { return std::vector<double>{0, 0, 0, 1, t}; };
    ScanOptions o;
    o.t0 = 0.5;
    o.t1 = 1.5;
    o.steps = 10;
    o.refinements = 10;
    const ScanReport r = weak_continuity_scan(lemma18_kernel(standard_simplex(3)).kernel, xi, path, o);
    CHECK(r.pass);
    CHECK(r.refined_jump < 1e-4);
    REQUIRE(r.rate.has_value());
    CHECK(*r.rate > 0.9);
    // phi = min(t, 1) / (2 pi) on this path
    for (const auto& [t, v] : r.samples) CHECK(v == doctest::Approx(std::min(t, 1.0) / (2 * kPi)).epsilon(1e-9));

    const ScanReport c = weak_continuity_scan(constant_kernel(3, 1), xi, path, o);
    CHECK(c.pass);
    auto bad = [](double t) { return std::vector<double>{0, 0, 0, -1, t}; };
    CHECK_THROWS_AS(weak_continuity_scan(constant_kernel(3, 1), xi, bad, o), EmptyPolytopeError);
}
