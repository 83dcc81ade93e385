#pragma once

#include "valab/polytope.hpp"

namespace valab {

struct Projection {
    Vec point;            // nearest point of the polytope
    double distance = 0;  // Euclidean distance to it
    double gap = 0;       // certified duality gap at termination
    int iterations = 0;
};

/// Nearest point of conv(vertices of P) to x by Wolfe's minimum-norm-point iteration.
/// Stops once the Frank-Wolfe duality gap is <= gap_tol; exceeding max_iter throws NumericalError.
Projection project_onto_polytope(const Polytope& p, const Vec& x, double gap_tol = 1e-10, int max_iter = 100000);

double point_distance(const Polytope& p, const Vec& x);

/// max over vertices of P of dist(v, Q).
double directed_hausdorff(const Polytope& p, const Polytope& q);

double hausdorff_distance(const Polytope& p, const Polytope& q);

struct Ball {
    Vec center;
    double radius = 1.0;
};

/// Hausdorff distance between a polytope and a Euclidean ball, sup_u |h_P(u) - h_B(u)|.
double hausdorff_distance(const Polytope& p, const Ball& b);

} // namespace valab
