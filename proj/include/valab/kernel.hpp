#pragma once

#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "valab/linalg.hpp"

namespace valab {

/// Smooth function f(E, l) on pairs (k-subspace E of R^n, line l in E-perp), in the Euclidean
/// trivialization. E is passed as an orthonormal n x k basis, l as a unit vector orthogonal
/// to E. Implementations must be even in l and independent of the chosen basis of E.
struct Kernel {
    int n = 0;
    int k = 0;
    std::function<double(const Mat&, const Vec&)> fn;
    std::string label;
    nlohmann::json spec;

    double operator()(const Mat& e, const Vec& l) const { return fn(e, l); }

    /// Throws ValidationError unless (n, k) match.
    void require_dims(int ambient, int degree) const;
};

/// Function on the Grassmannian G_k(R^n), same conventions for E.
struct GrassFunction {
    int n = 0;
    int k = 0;
    std::function<double(const Mat&)> fn;
    std::string label;

    double operator()(const Mat& e) const { return fn(e); }
};

} // namespace valab
