#include "valab/quadrature.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include "valab/error.hpp"

namespace valab {

namespace {

GaussRule compute_gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) { p1 = x; p0 = 1.0; }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// Kronrod 15-point nodes and weights with the embedded 7-point Gauss weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

QuadResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kron += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    return {kron * h, std::abs((kron - gauss) * h)};
}

QuadResult adapt(const std::function<double(double)>& f, double a, double b, const QuadResult& whole,
                 double tol, int depth) {
    if (whole.error <= tol || depth <= 0) return whole;
    const double m = 0.5 * (a + b);
    const QuadResult left = gk15(f, a, m);
    const QuadResult right = gk15(f, m, b);
    const QuadResult l = adapt(f, a, m, left, 0.5 * tol, depth - 1);
    const QuadResult r = adapt(f, m, b, right, 0.5 * tol, depth - 1);
    return {l.value + r.value, l.error + r.error};
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw ValidationError("gauss_legendre: order must be positive");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                              double abs_tol, int max_depth) {
    if (a == b) return {};
    const QuadResult whole = gk15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole.value));
    QuadResult r = adapt(f, a, b, whole, tol, max_depth);
    return r;
}

namespace {

double circle_average(const Vec& b0, const Vec& b1, const std::function<double(const Vec&)>& h,
                      const SphereOrders& orders) {
    if (!orders.kink_on_first_axis) {
        const int m = orders.azimuth;
        std::vector<double> vals(m);
        for (int j = 0; j < m; ++j) {
            const double t = 2.0 * kPi * j / m;
            vals[j] = h(std::cos(t) * b0 + std::sin(t) * b1);
        }
        return pairwise_sum(vals) / m;
    }
    // Kinks at t = +-pi/2: Gauss rules on the two half circles.
    const GaussRule& g = gauss_legendre(orders.polar);
    std::vector<double> vals;
    vals.reserve(2 * g.nodes.size());
    for (int half = 0; half < 2; ++half) {
        const double centre = half == 0 ? 0.0 : kPi;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double t = centre + 0.5 * kPi * g.nodes[i];
            vals.push_back(g.weights[i] * 0.5 * kPi * h(std::cos(t) * b0 + std::sin(t) * b1));
        }
    }
    return pairwise_sum(vals) / (2.0 * kPi);
}

} // namespace

double sphere_average(const Mat& basis, const std::function<double(const Vec&)>& h, const SphereOrders& orders) {
    const int q = static_cast<int>(basis.cols());
    if (q < 1) throw ValidationError("sphere_average: empty basis");
    if (q == 1) return 0.5 * (h(basis.col(0)) + h(-basis.col(0)));
    if (q == 2) return circle_average(basis.col(0), basis.col(1), h, orders);

    // v = cos(theta) b0 + sin(theta) w with w on the sphere of the remaining frame,
    // polar density proportional to sin^(q-2) theta, split at pi/2.
    const Mat rest = basis.rightCols(q - 1);
    SphereOrders inner = orders;
    inner.kink_on_first_axis = false;
    const GaussRule& g = gauss_legendre(orders.polar);
    std::vector<double> vals;
    std::vector<double> dens;
    for (int half = 0; half < 2; ++half) {
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double theta = 0.25 * kPi * (g.nodes[i] + 1.0) + 0.5 * kPi * half;
            const double w = g.weights[i] * 0.25 * kPi * std::pow(std::sin(theta), q - 2);
            const double c = std::cos(theta), s = std::sin(theta);
            const Vec b0 = basis.col(0);
            const double avg = sphere_average(
                rest, [&](const Vec& u) { return h(c * b0 + s * u); }, inner);
            vals.push_back(w * avg);
            dens.push_back(w);
        }
    }
    return pairwise_sum(vals) / pairwise_sum(dens);
}

SphereGrid make_sphere_grid(int n_polar, int n_azimuth) {
    const GaussRule& g = gauss_legendre(n_polar);
    SphereGrid grid;
    grid.points.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
    for (int i = 0; i < n_polar; ++i) {
        const double t = g.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = 2.0 * kPi * (j + 0.5) / n_azimuth;
            Vec p(3);
            p << s * std::cos(phi), s * std::sin(phi), t;
            grid.points.push_back(p);
            grid.weights.push_back(0.5 * g.weights[i] / n_azimuth);
        }
    }
    return grid;
}

} // namespace valab
