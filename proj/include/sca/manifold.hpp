#pragma once

// Geometry of M = St(N, p) x E(N, p): the decoder lives on the Stiefel
// factor, the encoder weights on the Euclidean factor. Embedded metric,
// polar retraction, projection-based vector transport.

#include "sca/data.hpp"

namespace sca {

/// N x p matrix with orthonormal columns, ||W^T W - I||_F <= 1e-8.
class StiefelPoint {
 public:
  static constexpr double kTolerance = 1e-8;

  StiefelPoint() = default;
  explicit StiefelPoint(Matrix m);

  /// Orthonormal factor of an arbitrary full-column-rank matrix (Householder QR,
  /// signs fixed so the R diagonal is positive).
  static StiefelPoint orthonormalize(const Matrix& a);

  const Matrix& matrix() const { return m_; }
  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }

 private:
  Matrix m_;
};

/// ||W^T W - I||_F.
double orthonormality_residual(const Matrix& w);

struct ProductPoint {
  Matrix w;              // encoder, Euclidean factor
  StiefelPoint w_tilde;  // decoder, Stiefel factor

  ProductPoint() = default;
  ProductPoint(Matrix w_, StiefelPoint w_tilde_);
};

/// Tangent vector on M: dw is free, dh is tangent to the Stiefel factor.
struct TangentPair {
  Matrix dw;
  Matrix dh;

  TangentPair operator-() const { return {-dw, -dh}; }
  TangentPair& operator*=(double s) {
    dw *= s;
    dh *= s;
    return *this;
  }
};

TangentPair operator+(const TangentPair& a, const TangentPair& b);
TangentPair operator*(double s, const TangentPair& a);

/// Euclidean gradient components: dw = df/dW, dh = df/dW~.
using EuclideanGrad = TangentPair;

/// ||W^T H + H^T W||_F.
double tangency_residual(const StiefelPoint& base, const Matrix& h);

/// Z - W sym(W^T Z).
Matrix project_tangent(const StiefelPoint& base, const Matrix& z);

/// Polar retraction (W + tH)(I + t^2 H^T H)^{-1/2}. Throws when H is not
/// tangent (residual above 1e-6 relative to max(1, ||H||_F)).
StiefelPoint retract(const StiefelPoint& base, const Matrix& h, double t);

/// (W + t dw, retract(W~, dh, t)).
ProductPoint retract(const ProductPoint& point, const TangentPair& direction, double t);

/// tr(P1^T P2) + tr(Q1^T Q2).
double inner(const TangentPair& a, const TangentPair& b);
double norm(const TangentPair& a);

/// Carries a tangent vector to new_base by projection; dw is unchanged.
TangentPair transport(const StiefelPoint& new_base, const TangentPair& v);

/// Euclidean factor passed through, Stiefel factor projected.
TangentPair riemannian_grad(const ProductPoint& point, const EuclideanGrad& egrad);

/// Inverse square root of a symmetric positive-definite matrix by
/// eigendecomposition, eigenvalues floored at 1e-14.
Matrix inverse_sqrt_spd(const Matrix& a);

}  // namespace sca
