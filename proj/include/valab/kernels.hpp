#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "valab/kernel.hpp"
#include "valab/polytope.hpp"

namespace valab {

Kernel constant_kernel(int n, int k, double value = 1.0);

/// Random smooth kernel
///   f(E,l) = c0 + sum_j (a_j + b_j |P_E u_j|^2) (l.w_j)^2 + g (l.v)^4
/// with coefficients and directions drawn from `seed`. `centered` subtracts the fiber means
/// (closed form), which puts the kernel in the kernel of S.
struct SeparableOptions {
    int terms = 3;
    bool centered = false;
    double scale = 1.0;
};
Kernel separable_kernel(int n, int k, std::uint64_t seed, const SeparableOptions& opts = {});

/// Fiber average S(f)(E) over lines in E-perp with mass-one measure.
GrassFunction smap(const Kernel& f);

/// (p*h)(E, l) = h(E).
Kernel pullback(const GrassFunction& h);

/// f - p*(S f): projects a kernel onto the kernel of S.
Kernel remove_fiber_mean(const Kernel& f);

/// Bump-times-profile kernel supported near the direction of one simplex edge:
///   f(E,l) = amplitude * bump(angle(E, F1)) * cos(h (theta - theta0)),
/// theta measured in a frame of E-perp that follows the exterior-arc centre of F1.
/// The profile has zero mean on every fiber, so S(f) = 0, while phi_f(simplex) picks up the
/// arc integral of F1 alone.
struct Lemma18Options {
    int va = 0;
    int vb = 1;
    int harmonic = 2;               // even, so the kernel is even in l
    std::optional<double> phase;    // theta0; unset = arc centre
    double amplitude = 1.0;
    double bump_width = 0.6;        // radians; must avoid every other edge direction
};

struct Lemma18Kernel {
    Kernel kernel;
    double edge_length = 0.0;
    double arc_width = 0.0;
    double arc_integral = 0.0;   // normalized integral of the profile over F1's exterior arc
    double predicted_phi = 0.0;  // edge_length * amplitude * arc_integral
    double measured_phi = 0.0;   // phi_f(simplex) summed over all edges with exact arcs
    double smap_sup = 0.0;       // sup |S f| over sampled E, including E near F1
    int smap_samples = 0;

    nlohmann::json report() const;
};

Lemma18Kernel lemma18_kernel(const Polytope& simplex, const Lemma18Options& opts = {});

/// Matrix field m -> A(m) on S^2 with A(-m) = -A(m). The associated kernel is
///   f(e, l) = (e x l) . A(l) e
/// symmetrized over the sign choices of e and l.
struct SphereForm {
    std::function<Mat(const Vec&)> matrix;
    std::string convention = "odd-matrix-field";
    nlohmann::json spec;
};

/// A(m) v = v x m; gives f = 1.
SphereForm round_form();
SphereForm zero_form();
/// A(m) = sum_i m_i C_i + (m^T Q m) sum_i m_i D_i with random C, D, symmetric Q.
SphereForm random_form(std::uint64_t seed, double scale = 1.0);
SphereForm combine_forms(double a, const SphereForm& x, double b, const SphereForm& y);

Kernel chform_kernel(const SphereForm& omega);

/// Restriction of a kernel on G_1(R^n) to G_1(W) for a 3-dimensional subspace W, in W coordinates:
///   g(E,l) = kappa * avg_{m in S(l + W-perp)} f(E,m) |m . l|.
Kernel restrict_kernel(const Kernel& f, const Mat& w, double kappa);

struct KappaEstimate {
    double value = 0.0;
    double error = 0.0;
};

/// kappa_n making restrict_kernel(1) = 1: reciprocal of the mean of |x_1| over S^{n-3}.
KappaEstimate calibrate_kappa(int n);

/// {"kind": "constant"|"separable"|"lemma18"|"chform"|"restricted", "params": {...}}
Kernel kernel_from_json(const nlohmann::json& j);

struct KernelCheck {
    double evenness = 0.0;          // max |f(E,l) - f(E,-l)|
    double basis_invariance = 0.0;  // max change under re-parameterizing E
    double lipschitz = 0.0;         // max finite-difference slope in l
    int samples = 0;
    bool ok = false;

    nlohmann::json to_json() const;
};

KernelCheck check_kernel(const Kernel& f, int samples = 64, std::uint64_t seed = 1);

/// Random pair (orthonormal basis of a k-subspace, unit vector orthogonal to it).
std::pair<Mat, Vec> random_flag(int n, int k, Rng& rng);

} // namespace valab
