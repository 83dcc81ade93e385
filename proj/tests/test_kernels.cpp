#include <doctest.h>

#include <cmath>

#include "valab/error.hpp"
#include "valab/kernels.hpp"

using namespace valab;

namespace {

Mat col(const Vec& v) { return Mat(v); }

// E|x_1| on S^{d-1}
double mean_abs_coordinate(int d) { return std::tgamma(0.5 * d) / (std::sqrt(kPi) * std::tgamma(0.5 * (d + 1))); }

} // namespace

TEST_CASE("S of simple kernels") {
    Rng rng(1);
    const GrassFunction s1 = smap(constant_kernel(4, 2));
    for (int i = 0; i < 5; ++i) CHECK(s1(random_frame(4, 2, rng)) == doctest::Approx(1.0).epsilon(1e-12));

    const Vec e2 = Vec::Unit(3, 1);
    const Kernel sq{3, 1, [e2](const Mat&, const Vec& l) { return std::pow(l.dot(e2), 2); }, "sq", {}};
    CHECK(smap(sq)(col(Vec::Unit(3, 0))) == doctest::Approx(0.5).epsilon(1e-12));

    // (l.w)^4 has fiber mean 3 s^4 / (q (q + 2)) with s = |P_{E-perp} w|
    for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 1}, {4, 1}, {4, 2}, {5, 2}}) {
        const Vec w = random_unit(n, rng);
        const Kernel quart{n, k, [w](const Mat&, const Vec& l) { return std::pow(l.dot(w), 4); }, "quart", {}};
        const GrassFunction s = smap(quart);
        for (int i = 0; i < 4; ++i) {
            const Mat e = random_frame(n, k, rng);
            const double s2 = 1.0 - (e.transpose() * w).squaredNorm();
            const double q = n - k;
            CHECK(s(e) == doctest::Approx(3.0 * s2 * s2 / (q * (q + 2))).epsilon(1e-10));
        }
    }
}

TEST_CASE("pullback and fiber-mean removal") {
    Rng rng(2);
    const Vec u = random_unit(4, rng);
    const GrassFunction h{4, 1, [u](const Mat& e) { return 0.3 + (e.transpose() * u).squaredNorm(); }, "h"};
    const GrassFunction back = smap(pullback(h));
    for (int i = 0; i < 5; ++i) {
        const Mat e = random_frame(4, 1, rng);
        CHECK(back(e) == doctest::Approx(h(e)).epsilon(1e-12));
    }
    const Kernel g = separable_kernel(3, 1, 9);
    const GrassFunction s = smap(remove_fiber_mean(g));
    const GrassFunction sc = smap(separable_kernel(3, 1, 9, {3, true, 1.0}));
    for (int i = 0; i < 5; ++i) {
        const Mat e = random_frame(3, 1, rng);
        CHECK(std::abs(s(e)) < 1e-12);
        CHECK(std::abs(sc(e)) < 1e-12);
    }
    for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 1}, {4, 1}, {4, 2}, {5, 3}}) {
        const KernelCheck c = check_kernel(separable_kernel(n, k, 5), 32, 3);
        CHECK(c.ok);
    }
}

TEST_CASE("lemma18 kernel") {
    const Polytope s = standard_simplex(3);
    const Lemma18Kernel l18 = lemma18_kernel(s);
    CHECK(l18.arc_width == doctest::Approx(0.5 * kPi).epsilon(1e-12));
    // unit edge, arc of width pi/2, cos(2 theta) centred: sin(pi/2) / (2 pi)
    CHECK(l18.predicted_phi == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
    CHECK(l18.measured_phi == doctest::Approx(l18.predicted_phi).epsilon(1e-9));
    CHECK(l18.smap_sup < 1e-8);
    CHECK(check_kernel(l18.kernel, 64, 4).ok);

    // narrower bumps leave the value unchanged: only F1's own fiber contributes
    for (double w : {0.05, 0.3}) {
        Lemma18Options o;
        o.bump_width = w;
        CHECK(lemma18_kernel(s, o).measured_phi == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-9));
    }
    Lemma18Options zero;
    zero.amplitude = 0.0;
    CHECK(lemma18_kernel(s, zero).measured_phi == 0.0);

    Lemma18Options phased;
    phased.phase = 0.3;
    const double a = 0.25 * kPi;
    CHECK(lemma18_kernel(s, phased).measured_phi ==
          doctest::Approx((std::sin(2 * (a - 0.3)) + std::sin(2 * (a + 0.3))) / (4 * kPi)).epsilon(1e-9));

    Lemma18Options wide;
    wide.bump_width = 0.9;
    CHECK_THROWS_AS(lemma18_kernel(s, wide), ValidationError);
    Lemma18Options odd;
    odd.harmonic = 3;
    CHECK_THROWS_AS(lemma18_kernel(s, odd), ValidationError);
    Lemma18Options flat;
    flat.harmonic = 4;  // sin(4 * pi/4) = 0 on a quarter arc
    CHECK_THROWS_AS(lemma18_kernel(s, flat), ValidationError);
    CHECK_THROWS_AS(lemma18_kernel(unit_cube(3)), ValidationError);
}

TEST_CASE("chform kernels") {
    Rng rng(5);
    const Kernel round = chform_kernel(round_form());
    const Kernel zero = chform_kernel(zero_form());
    for (int i = 0; i < 10; ++i) {
        const auto [e, l] = random_flag(3, 1, rng);
        CHECK(round(e, l) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(zero(e, l) == 0.0);
    }
    const SphereForm a = random_form(1), b = random_form(2);
    const Kernel fa = chform_kernel(a), fb = chform_kernel(b);
    const Kernel fab = chform_kernel(combine_forms(2.0, a, -0.5, b));
    CHECK(check_kernel(fa, 64, 6).ok);
    CHECK(check_kernel(fb, 64, 7).ok);
    for (int i = 0; i < 10; ++i) {
        const auto [e, l] = random_flag(3, 1, rng);
        CHECK(fab(e, l) == doctest::Approx(2.0 * fa(e, l) - 0.5 * fb(e, l)).epsilon(1e-9));
    }

    // a constant matrix field flips sign with l: the symmetrization is identically zero
    SphereForm even;
    even.matrix = [](const Vec&) { return Mat(Mat::Identity(3, 3) + Mat::Ones(3, 3)); };
    CHECK_THROWS_AS(chform_kernel(even), ValidationError);
    // mixed parity: sign choices disagree in absolute value
    SphereForm mixed;
    mixed.matrix = [](const Vec& m) {
        Mat a = Mat::Ones(3, 3);
        a(0, 1) += 3.0 * m(0);
        a(1, 2) -= 2.0 * m(2);
        return a;
    };
    CHECK_THROWS_AS(chform_kernel(mixed), ValidationError);
}

TEST_CASE("restriction operator and kappa") {
    CHECK(calibrate_kappa(4).value == doctest::Approx(0.5 * kPi).epsilon(1e-10));
    CHECK(std::abs(calibrate_kappa(4).value - 0.5 * kPi) < 1e-8);
    for (int n : {5, 6, 7}) CHECK(calibrate_kappa(n).value == doctest::Approx(1.0 / mean_abs_coordinate(n - 2)).epsilon(1e-10));
    CHECK_THROWS_AS(calibrate_kappa(3), ValidationError);

    Rng rng(8);
    for (int n : {4, 5}) {
        const Mat w = random_frame(n, 3, rng);
        const Kernel g = restrict_kernel(constant_kernel(n, 1), w, calibrate_kappa(n).value);
        for (int i = 0; i < 5; ++i) {
            const auto [e, l] = random_flag(3, 1, rng);
            CHECK(std::abs(g(e, l) - 1.0) < 1e-6);
        }
    }

    // invariance under rotations of R^4 that fix W pointwise
    const Mat w = Mat::Identity(4, 3);
    const Kernel f = separable_kernel(4, 1, 21);
    Mat rot = Mat::Identity(4, 4);
    rot(3, 3) = -1.0;  // the only rotation-like isometry fixing W in R^4 is the reflection of W-perp
    const Kernel fr{4, 1, [f, rot](const Mat& e, const Vec& l) { return f(rot * e, rot * l); }, "rotated", {}};
    const Kernel g1 = restrict_kernel(f, w, 0.5 * kPi), g2 = restrict_kernel(fr, w, 0.5 * kPi);
    for (int i = 0; i < 5; ++i) {
        const auto [e, l] = random_flag(3, 1, rng);
        CHECK(g1(e, l) == doctest::Approx(g2(e, l)).epsilon(1e-9));
    }
    // in R^5 W-perp is a plane with genuine rotations
    const Kernel f5 = separable_kernel(5, 1, 22);
    Mat rot5 = Mat::Identity(5, 5);
    rot5(3, 3) = rot5(4, 4) = std::cos(0.7);
    rot5(3, 4) = -std::sin(0.7);
    rot5(4, 3) = std::sin(0.7);
    const Kernel f5r{5, 1, [f5, rot5](const Mat& e, const Vec& l) { return f5(rot5 * e, rot5 * l); }, "rotated", {}};
    const Kernel h1 = restrict_kernel(f5, Mat::Identity(5, 3), 2.0), h2 = restrict_kernel(f5r, Mat::Identity(5, 3), 2.0);
    for (int i = 0; i < 5; ++i) {
        const auto [e, l] = random_flag(3, 1, rng);
        CHECK(h1(e, l) == doctest::Approx(h2(e, l)).epsilon(1e-6));
    }
    // kernels vanishing on every S(l + W-perp) restrict to zero
    const Kernel away{4, 1, [](const Mat& e, const Vec&) { return std::abs(e(3, 0)) > 0.5 ? 1.0 : 0.0; }, "away", {}};
    const Kernel gz = restrict_kernel(away, w, 0.5 * kPi);
    for (int i = 0; i < 3; ++i) {
        const auto [e, l] = random_flag(3, 1, rng);
        CHECK(gz(e, l) == 0.0);
    }
    CHECK_THROWS_AS(restrict_kernel(constant_kernel(3, 1), Mat::Identity(3, 3), 1.0), ValidationError);
}

TEST_CASE("kernel specs") {
    for (const char* text : {R"({"kind":"constant","params":{"n":4,"k":2}})",
                             R"({"kind":"separable","params":{"n":3,"k":1,"seed":4,"centered":true}})",
                             R"({"kind":"lemma18","params":{"edge":[0,1],"bump_width":0.5}})",
                             R"({"kind":"chform","params":{"preset":"random","seed":3}})",
                             R"({"kind":"restricted","params":{"base":{"kind":"separable","params":{"n":4,"k":1}}}})"}) {
        const Kernel f = kernel_from_json(nlohmann::json::parse(text));
        CHECK(!f.spec.is_null());
        const Kernel again = kernel_from_json(f.spec);
        Rng rng(1);
        const auto [e, l] = random_flag(f.n, f.k, rng);
        CHECK(again(e, l) == doctest::Approx(f(e, l)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(kernel_from_json(nlohmann::json::parse(R"({"kind":"nope"})")), ValidationError);
    CHECK_THROWS_AS(kernel_from_json(nlohmann::json::parse(R"({"params":{}})")), ValidationError);
    CHECK_THROWS_AS(kernel_from_json(nlohmann::json::parse(R"({"kind":"constant","params":{"n":3,"k":3}})")), ValidationError);
}
