#include "valab/transforms.hpp"

#include <cmath>
#include <cstdio>

#include "valab/error.hpp"
#include "valab/kernels.hpp"
#include "valab/parallel.hpp"
#include "valab/quadrature.hpp"

namespace valab {

namespace {

// Associated Legendre P_l^m(x), m >= 0, without the Condon-Shortley phase.
double assoc_legendre(int l, int m, double x) {
    double pmm = 1.0;
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    for (int i = 1; i <= m; ++i) pmm *= (2.0 * i - 1.0) * s;
    if (l == m) return pmm;
    double pm1 = x * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) return pm1;
    double pl = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pl = (x * (2.0 * ll - 1.0) * pm1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pm1;
        pm1 = pl;
    }
    return pl;
}

const SphereGrid& analysis_grid() {
    // exact for polynomial integrands of degree < 80
    static const SphereGrid g = make_sphere_grid(40, 80);
    return g;
}

void require_even(const SphereFunction& g) {
    for (int i = 0; i < 6; ++i) {
        Vec v(g.n);
        for (int c = 0; c < g.n; ++c) v(c) = std::cos(0.37 + 1.91 * i + 0.83 * c * (i + 1));
        v.normalize();
        const double a = g(v), b = g(-v);
        if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(a))) throw ValidationError("sphere function '" + g.label + "' is not even");
    }
}

} // namespace

double real_harmonic(int l, int m, const Vec& v) {
    if (l < 0 || std::abs(m) > l) throw ValidationError("real_harmonic: need |m| <= l");
    const double x = std::clamp(v(2), -1.0, 1.0);
    const int am = std::abs(m);
    if (am == 0) return std::sqrt(2.0 * l + 1.0) * assoc_legendre(l, 0, x);
    double ratio = 1.0;  // (l-m)!/(l+m)!
    for (int i = l - am + 1; i <= l + am; ++i) ratio /= i;
    const double norm = std::sqrt(2.0 * (2.0 * l + 1.0) * ratio);
    const double phi = std::atan2(v(1), v(0));
    return norm * assoc_legendre(l, am, x) * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

SphereFunction cosine_transform(const SphereFunction& g) {
    if (g.n != 3 && g.n != 4) throw ValidationError("cosine_transform: n must be 3 or 4");
    require_even(g);
    SphereFunction out;
    out.n = g.n;
    out.even = true;
    out.label = "C(" + g.label + ")";
    if (g.n == 3) {
        out.fn = [g](const Vec& u) {
            const Mat frame = orthogonal_complement(Mat(u), 3);
            const GaussRule& rule = gauss_legendre(48);
            constexpr int kAz = 96;
            std::vector<double> terms;
            terms.reserve(rule.nodes.size());
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double t = 0.5 * (rule.nodes[i] + 1.0);  // [0, 1]
                const double r = std::sqrt(std::max(0.0, 1.0 - t * t));
                double ring = 0.0;
                for (int j = 0; j < kAz; ++j) {
                    const double phi = 2.0 * kPi * (j + 0.5) / kAz;
                    ring += g(t * u + r * (std::cos(phi) * frame.col(0) + std::sin(phi) * frame.col(1)));
                }
                terms.push_back(0.5 * rule.weights[i] * t * ring / kAz);
            }
            return pairwise_sum(terms);
        };
    } else {
        out.fn = [g](const Vec& u) {
            Mat basis(4, 4);
            basis << u, orthogonal_complement(Mat(u), 4);
            return sphere_average(basis, [&](const Vec& v) { return std::abs(v.dot(u)) * g(v); }, SphereOrders{32, 64, true});
        };
    }
    return out;
}

double HarmonicSpectrum::degree_energy(int l) const {
    double e = 0.0;
    for (double c : blocks.at(l)) e += c * c;
    return e;
}

nlohmann::json HarmonicSpectrum::to_json() const {
    nlohmann::json b = nlohmann::json::object();
    for (int l = 0; l <= max_degree; l += 2) b[std::to_string(l)] = blocks[l];
    return {{"max_degree", max_degree},
            {"blocks", b},
            {"total_energy", total_energy},
            {"odd_residual", odd_energy},
            {"truncation_residual", truncation_residual}};
}

HarmonicSpectrum harmonic_project(const SphereFunction& g, int max_degree) {
    if (max_degree < 0) throw ValidationError("harmonic_project: max_degree must be >= 0");
    if (g.n != 3) throw ValidationError("harmonic_project: only S^2 is supported");
    const SphereGrid& grid = analysis_grid();
    const std::size_t np = grid.points.size();
    std::vector<double> values(np);
    parallel_for(np, [&](std::size_t i) { values[i] = g(grid.points[i]); });

    HarmonicSpectrum s;
    s.max_degree = max_degree;
    std::vector<double> sq(np);
    for (std::size_t i = 0; i < np; ++i) sq[i] = grid.weights[i] * values[i] * values[i];
    s.total_energy = pairwise_sum(sq);
    double captured = 0.0;
    std::vector<double> terms(np);
    for (int l = 0; l <= max_degree; ++l) {
        std::vector<double> block;
        for (int m = -l; m <= l; ++m) {
            for (std::size_t i = 0; i < np; ++i) terms[i] = grid.weights[i] * values[i] * real_harmonic(l, m, grid.points[i]);
            block.push_back(pairwise_sum(terms));
        }
        s.blocks.push_back(block);
        const double e = s.degree_energy(l);
        captured += e;
        if (l % 2 == 1) s.odd_energy += e;
    }
    s.truncation_residual = std::max(0.0, s.total_energy - captured);
    return s;
}

nlohmann::json MultiplierTable::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < degrees.size(); ++i)
        rows.push_back({{"degree", degrees[i]}, {"multiplier", multipliers[i]}, {"leakage", leakage[i]}});
    return rows;
}

MultiplierTable cosine_multipliers(int max_degree, double leakage_tol) {
    if (max_degree < 0 || max_degree > 16) throw ValidationError("cosine_multipliers: max_degree must be in [0, 16]");
    if (!(leakage_tol >= 0)) throw ValidationError("cosine_multipliers: leakage tolerance must be non-negative");
    MultiplierTable t;
    for (int d = 0; d <= max_degree; d += 2) {
        const int m = d / 2;  // a harmonic without rotational symmetry about the grid axis
        const SphereFunction y{3, [d, m](const Vec& v) { return real_harmonic(d, m, v); }, true, "Y"};
        const HarmonicSpectrum s = harmonic_project(cosine_transform(y), std::min(max_degree + 2, 18));
        const double lambda = s.blocks[d][d + m];
        const double leak = s.total_energy > 0 ? 1.0 - s.degree_energy(d) / s.total_energy : 0.0;
        if (std::abs(leak) > leakage_tol) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "cosine_multipliers: degree %d leaks %.3e of its energy (tolerance %.3e)", d,
                          leak, leakage_tol);
            throw NumericalError(buf);
        }
        t.degrees.push_back(d);
        t.multipliers.push_back(lambda);
        t.leakage.push_back(std::abs(leak));
    }
    return t;
}

nlohmann::json RangeDiagnostic::to_json() const {
    nlohmann::json pe = nlohmann::json::object();
    for (std::size_t i = 0; i < preimage_energy.size(); ++i) pe[std::to_string(2 * i)] = preimage_energy[i];
    return {{"s_energy", s_energy},
            {"s_spectrum", s_spectrum.to_json()},
            {"preimage_energy_by_degree", pe},
            {"preimage_constant", preimage_constant}};
}

RangeDiagnostic range_diagnostic(const Kernel& f, int max_degree) {
    if (f.n != 3 || f.k != 1) throw ValidationError("range_diagnostic: only n = 3, k = 1");
    if (max_degree < 0 || max_degree > 16) throw ValidationError("range_diagnostic: max_degree must be in [0, 16]");
    const GrassFunction s = smap(f);
    const SphereFunction sf{3, [s](const Vec& u) { return s(Mat(u)); }, true, "S(" + f.label + ")"};
    RangeDiagnostic r;
    r.s_spectrum = harmonic_project(sf, max_degree);
    r.s_energy = r.s_spectrum.total_energy;
    const MultiplierTable mult = cosine_multipliers(max_degree - max_degree % 2);
    for (std::size_t i = 0; i < mult.degrees.size(); ++i) {
        const int d = mult.degrees[i];
        r.preimage_energy.push_back(r.s_spectrum.degree_energy(d) / (mult.multipliers[i] * mult.multipliers[i]));
    }
    r.preimage_constant = r.s_spectrum.blocks[0][0] / mult.multipliers[0];
    return r;
}

} // namespace valab
