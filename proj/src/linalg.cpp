#include "valab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "valab/error.hpp"

namespace valab {

Mat orthonormal_basis(const Mat& a, double tol) {
    if (a.cols() == 0) return Mat(a.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > tol) ++rank;
    return svd.matrixU().leftCols(rank);
}

Mat orthogonal_complement(const Mat& basis, int n) {
    const int k = static_cast<int>(basis.cols());
    if (k == 0) return Mat::Identity(n, n);
    if (k >= n) return Mat(n, 0);
    // Full U of the SVD spans R^n; the trailing columns span the complement.
    Eigen::JacobiSVD<Mat> svd(basis, Eigen::ComputeFullU);
    Mat comp = svd.matrixU().rightCols(n - k);
    // Deterministic sign: first non-negligible entry of each column positive.
    for (int j = 0; j < comp.cols(); ++j) {
        for (int i = 0; i < n; ++i) {
            if (std::abs(comp(i, j)) > 1e-12) {
                if (comp(i, j) < 0) comp.col(j) *= -1.0;
                break;
            }
        }
    }
    return comp;
}

int affine_dimension(std::span<const Vec> points, double tol) {
    if (points.size() <= 1) return 0;
    const auto n = points.front().size();
    Mat d(n, static_cast<Eigen::Index>(points.size() - 1));
    for (std::size_t i = 1; i < points.size(); ++i) d.col(static_cast<Eigen::Index>(i - 1)) = points[i] - points[0];
    return static_cast<int>(orthonormal_basis(d, tol).cols());
}

Vec random_unit(int n, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(n);
    double norm = 0.0;
    do {
        for (int i = 0; i < n; ++i) v(i) = gauss(rng);
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

Mat random_orthogonal(int n, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
}

Mat random_frame(int n, int k, Rng& rng) {
    if (k < 0 || k > n) throw ValidationError("random_frame: need 0 <= k <= n");
    return random_orthogonal(n, rng).leftCols(k);
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Vec cross3(const Vec& a, const Vec& b) {
    if (a.size() != 3 || b.size() != 3) throw ValidationError("cross3: 3-vectors required");
    Vec c(3);
    c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
    return c;
}

} // namespace valab
