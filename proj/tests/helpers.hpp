#pragma once
// Shared fixtures for the unit and acceptance tests.
#include "sca/data.hpp"
#include "sca/manifold.hpp"
#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>

namespace sca::testing {

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> nd(0.0, sd);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline StiefelPoint random_stiefel(Index n, Index p, std::mt19937_64& rng) {
  return StiefelPoint::orthonormalize(gaussian(n, p, rng));
}

inline Matrix random_tangent(const StiefelPoint& base, std::mt19937_64& rng) {
  return project_tangent(base, gaussian(base.rows(), base.cols(), rng));
}

/// Largest principal angle between the column spans of two orthonormal bases.
inline double max_principal_angle(const Matrix& a, const Matrix& b) {
  Eigen::JacobiSVD<Matrix> svd(a.transpose() * b);
  const double smallest = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  // sin of the largest angle is more accurate than acos near zero.
  const Matrix resid = b - a * (a.transpose() * b);
  Eigen::JacobiSVD<Matrix> r(resid);
  const double s = std::min(1.0, r.singularValues().maxCoeff());
  return smallest > 0.7 ? std::asin(s) : std::acos(smallest);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

}  // namespace sca::testing

namespace sca::testing {

/// Velocity of t -> R(base, tH) at t, by central differences: the
/// differentiated-retraction transport of H to R(base, tH).
inline Matrix fd_transport(const StiefelPoint& base, const Matrix& h, double t,
                           double step = 1e-6) {
  const Matrix plus = retract(base, h, t + step).matrix();
  const Matrix minus = retract(base, h, t - step).matrix();
  return (plus - minus) / (2.0 * step);
}

}  // namespace sca::testing
