#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace valab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Global incidence tolerance for coordinates of magnitude O(1).
inline constexpr double kTol = 1e-9;

inline constexpr double kPi = 3.14159265358979323846;

using Rng = std::mt19937_64;

/// Orthonormal basis (as columns) of the column span of `a`, rank decided by `tol`.
Mat orthonormal_basis(const Mat& a, double tol = kTol);

/// Orthonormal basis of the orthogonal complement of the column span of `basis` in R^n.
/// `basis` is assumed orthonormal (n x k); the result is n x (n-k).
Mat orthogonal_complement(const Mat& basis, int n);

/// Affine dimension of a point set.
int affine_dimension(std::span<const Vec> points, double tol = kTol);

Vec random_unit(int n, Rng& rng);
Mat random_orthogonal(int n, Rng& rng);

/// Random orthonormal k-frame in R^n.
Mat random_frame(int n, int k, Rng& rng);

/// Stable (pairwise) summation with a fixed reduction order.
double pairwise_sum(std::span<const double> values);

/// splitmix64 step, used to derive independent per-task seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// 3-vector cross product on dynamic vectors.
Vec cross3(const Vec& a, const Vec& b);

/// Projection of `v` onto the column span of the orthonormal `basis`.
inline Vec project_onto(const Mat& basis, const Vec& v) { return basis * (basis.transpose() * v); }

} // namespace valab
