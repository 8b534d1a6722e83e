#include "sca/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sca {

namespace {

constexpr double kEigenFloor = 1e-14;
constexpr double kTangencyTolerance = 1e-6;

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

double orthonormality_residual(const Matrix& w) {
  return (w.transpose() * w - Matrix::Identity(w.cols(), w.cols())).norm();
}

StiefelPoint::StiefelPoint(Matrix m) : m_(std::move(m)) {
  if (m_.cols() < 1 || m_.rows() < m_.cols()) {
    throw std::invalid_argument("StiefelPoint: need N >= p >= 1");
  }
  const double r = orthonormality_residual(m_);
  if (!(r <= kTolerance)) {
    throw std::invalid_argument("StiefelPoint: columns not orthonormal (residual " +
                                std::to_string(r) + ")");
  }
}

StiefelPoint StiefelPoint::orthonormalize(const Matrix& a) {
  if (a.cols() < 1 || a.rows() < a.cols()) {
    throw std::invalid_argument("StiefelPoint::orthonormalize: need N >= p >= 1");
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < a.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return StiefelPoint(std::move(q));
}

ProductPoint::ProductPoint(Matrix w_, StiefelPoint w_tilde_)
    : w(std::move(w_)), w_tilde(std::move(w_tilde_)) {
  require_same_shape(w, w_tilde.matrix(), "ProductPoint");
}

TangentPair operator+(const TangentPair& a, const TangentPair& b) {
  return {a.dw + b.dw, a.dh + b.dh};
}

TangentPair operator*(double s, const TangentPair& a) { return {s * a.dw, s * a.dh}; }

double tangency_residual(const StiefelPoint& base, const Matrix& h) {
  require_same_shape(base.matrix(), h, "tangency_residual");
  const Matrix wh = base.matrix().transpose() * h;
  return (wh + wh.transpose()).norm();
}

Matrix project_tangent(const StiefelPoint& base, const Matrix& z) {
  require_same_shape(base.matrix(), z, "project_tangent");
  const Matrix& w = base.matrix();
  return z - w * sym(w.transpose() * z);
}

Matrix inverse_sqrt_spd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("inverse_sqrt_spd: eigendecomposition failed");
  }
  const Vector inv_sqrt =
      eig.eigenvalues().unaryExpr([](double l) { return 1.0 / std::sqrt(std::max(l, kEigenFloor)); });
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

StiefelPoint retract(const StiefelPoint& base, const Matrix& h, double t) {
  require_same_shape(base.matrix(), h, "retract");
  if (!std::isfinite(t)) throw std::invalid_argument("retract: non-finite step");
  const double residual = tangency_residual(base, h);
  if (residual > kTangencyTolerance * std::max(1.0, h.norm())) {
    throw std::invalid_argument("retract: direction is not tangent (residual " +
                                std::to_string(residual) + ")");
  }
  if (t == 0.0) return base;
  const Matrix y = base.matrix() + t * h;
  // For tangent H on an exact Stiefel point Y^T Y = I + t^2 H^T H; the Gram
  // form also absorbs rounding drift in the base.
  const Matrix gram = y.transpose() * y;
  return StiefelPoint(y * inverse_sqrt_spd(gram));
}

ProductPoint retract(const ProductPoint& point, const TangentPair& direction, double t) {
  require_same_shape(point.w, direction.dw, "retract");
  return ProductPoint(point.w + t * direction.dw, retract(point.w_tilde, direction.dh, t));
}

double inner(const TangentPair& a, const TangentPair& b) {
  require_same_shape(a.dw, b.dw, "inner");
  require_same_shape(a.dh, b.dh, "inner");
  return a.dw.cwiseProduct(b.dw).sum() + a.dh.cwiseProduct(b.dh).sum();
}

double norm(const TangentPair& a) { return std::sqrt(inner(a, a)); }

TangentPair transport(const StiefelPoint& new_base, const TangentPair& v) {
  require_same_shape(v.dw, v.dh, "transport");
  return {v.dw, project_tangent(new_base, v.dh)};
}

TangentPair riemannian_grad(const ProductPoint& point, const EuclideanGrad& egrad) {
  require_same_shape(point.w, egrad.dw, "riemannian_grad");
  return {egrad.dw, project_tangent(point.w_tilde, egrad.dh)};
}

}  // namespace sca
