#pragma once

#include <functional>
#include <vector>

#include "valab/linalg.hpp"

namespace valab {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
const GaussRule& gauss_legendre(int n);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-10, double abs_tol = 1e-14, int max_depth = 40);

struct SphereOrders {
    int polar = 24;      // Gauss nodes per polar half-range
    int azimuth = 64;    // trapezoid points on full circles
    bool kink_on_first_axis = false;  // integrand has |v . b0| type kink
};

/// Average of h over the unit sphere of span(basis), normalized to total mass 1.
/// `basis` is an orthonormal n x q frame, q >= 1.
double sphere_average(const Mat& basis, const std::function<double(const Vec&)>& h,
                      const SphereOrders& orders = {});

/// Product rule on S^2: Gauss-Legendre in cos(theta) times a uniform azimuth grid.
/// Weights sum to one.
struct SphereGrid {
    std::vector<Vec> points;
    std::vector<double> weights;
};

SphereGrid make_sphere_grid(int n_polar, int n_azimuth);

} // namespace valab
