#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "valab/faces.hpp"
#include "valab/kernel.hpp"
#include "valab/sequences.hpp"

namespace valab {

struct PhiOptions {
    Method method = Method::Auto;
    long samples = 100000;  // per face, Monte Carlo only
    std::uint64_t seed = 0;
};

struct FaceTerm {
    int face_id = 0;
    std::vector<int> vertex_ids;
    double kvol = 0.0;
    double inner = 0.0;  // integral of f over the exterior angle
    double inner_error = 0.0;
    double contribution = 0.0;
};

struct ValuationResult {
    int k = 0;
    double value = 0.0;
    double error_estimate = 0.0;
    std::vector<FaceTerm> terms;
    Method method = Method::Auto;  // as resolved: exact, mc, or auto when faces mixed
    long samples = 0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

/// phi_f(P) = sum over k-faces F of vol(F) * integral of f(F-bar, .) over the exterior angle at F.
/// A body of affine dimension k is its own face with the full sphere as exterior angle.
ValuationResult phi(const Kernel& f, const Polytope& p, const PhiOptions& opts = {});

/// phi of the constant kernel; equals V_k with the mass-one angle normalization.
ValuationResult intrinsic_volume(const Polytope& p, int k, const PhiOptions& opts = {});

/// phi_f of the unit k-cube spanned by the orthonormal basis E.
double klain_function(const Kernel& f, const Mat& e);

/// Value on the ball of radius R (n = 3, k = 1) of the valuation obtained by integrating
/// over the normal cycle: 2R * avg_l [f(t1, l) + f(t2, l)], t1, t2 an orthonormal basis of l-perp.
/// Meaningful for kernels whose valuation extends continuously (e.g. the chform image).
Estimate ball_normal_cycle_value(const Kernel& f, double radius);

enum class Extrapolation { None, Richardson };
Extrapolation parse_extrapolation(const std::string& s);

struct ProbeOptions {
    std::vector<int> members;  // sequence indices; empty = default_members(family, 64)
    Extrapolation extrapolation = Extrapolation::Richardson;
    PhiOptions phi;
    /// For smooth limits: a second sequence whose extrapolated limit serves as reference.
    std::optional<PolytopeSequence> reference;
};

/// Powers of two up to m_max starting at the smallest valid index of the family.
std::vector<int> default_members(const std::string& family, int m_max);

struct ProbeSample {
    int m = 0;
    double d_hausdorff = 0.0;
    double phi = 0.0;
    double error = 0.0;
    int vertices = 0;
};

struct LimitEstimate {
    double value = 0.0;
    double uncertainty = 0.0;
    bool monotone_tail = true;
    nlohmann::json diagnostics;
};

/// Limit of phi along samples: linear fit phi = L + c d_H over the last four members
/// (first-order convergence assumed), or the last value when extrapolation is None.
LimitEstimate extrapolate(const std::vector<ProbeSample>& samples, Extrapolation how);

struct ProbeReport {
    nlohmann::json kernel_spec;
    nlohmann::json family_spec;
    std::vector<ProbeSample> samples;
    LimitEstimate limit;
    double phi_at_limit = 0.0;
    double phi_at_limit_uncertainty = 0.0;
    std::string reference_source;
    nlohmann::json reference_family;
    std::string verdict;  // converges-to-value | converges-elsewhere | inconclusive
    double margin = 0.0;  // |limit - reference| / combined uncertainty
    double combined_uncertainty = 0.0;
    std::string extrapolation;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

ProbeReport continuity_probe(const Kernel& f, const PolytopeSequence& seq, const ProbeOptions& opts = {});

struct ScanOptions {
    double t0 = 0.0;
    double t1 = 1.0;
    int steps = 16;
    int refinements = 12;
    double jump_tol = 1e-4;
    double min_rate = 0.5;
    PhiOptions phi;
};

struct ScanReport {
    std::vector<std::pair<double, double>> samples;     // (t, phi)
    std::vector<std::pair<double, double>> refinement;  // (interval width, jump)
    double max_jump = 0.0;
    double jump_location = 0.0;
    double refined_jump = 0.0;
    std::optional<double> rate;  // log-log slope of jump against width; unset when jumps vanish
    bool pass = false;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

/// Samples t -> phi_f(P_xi(y(t))) on a uniform grid, then bisects towards the largest jump.
/// Passes when the refined jump is below jump_tol and shrinks at least like width^min_rate.
ScanReport weak_continuity_scan(const Kernel& f, std::span<const Vec> xi,
                                const std::function<std::vector<double>(double)>& path, const ScanOptions& opts = {});

} // namespace valab
