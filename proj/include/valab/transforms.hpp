#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "valab/kernel.hpp"

namespace valab {

struct SphereFunction {
    int n = 3;
    std::function<double(const Vec&)> fn;
    bool even = true;
    std::string label;

    double operator()(const Vec& v) const { return fn(v); }
};

/// Real spherical harmonic of degree l and order m (|m| <= l) on S^2, orthonormal for the
/// mass-one measure. Negative m selects the sine family.
double real_harmonic(int l, int m, const Vec& v);

/// (Cg)(u) = integral over S^{n-1} of |u.v| g(v), mass-one measure. n = 3 or 4; g must be even.
SphereFunction cosine_transform(const SphereFunction& g);

struct HarmonicSpectrum {
    int max_degree = 0;
    std::vector<std::vector<double>> blocks;  // blocks[l] = coefficients for m = -l..l
    double total_energy = 0.0;                // integral of g^2
    double odd_energy = 0.0;                  // energy found in odd degrees
    double truncation_residual = 0.0;         // energy above max_degree

    double degree_energy(int l) const;
    nlohmann::json to_json() const;
};

HarmonicSpectrum harmonic_project(const SphereFunction& g, int max_degree);

struct MultiplierTable {
    std::vector<int> degrees;
    std::vector<double> multipliers;
    std::vector<double> leakage;  // fraction of the transformed energy outside degree d

    nlohmann::json to_json() const;
};

/// Eigenvalues of the cosine transform on even degrees 0..max_degree (n = 3), read off by
/// transforming one harmonic per degree. Throws NumericalError if leakage exceeds leakage_tol.
MultiplierTable cosine_multipliers(int max_degree, double leakage_tol = 1e-6);

struct RangeDiagnostic {
    HarmonicSpectrum s_spectrum;         // spectrum of S(f) viewed as a function of the line E
    std::vector<double> preimage_energy; // per even degree, energy of C^{-1} S(f)
    double s_energy = 0.0;
    double preimage_constant = 0.0;      // degree-0 coefficient of the preimage

    nlohmann::json to_json() const;
};

/// S(f) on a fixed grid of lines, its harmonic spectrum and the preimage under the cosine
/// transform. n = 3, k = 1.
RangeDiagnostic range_diagnostic(const Kernel& f, int max_degree = 8);

} // namespace valab
