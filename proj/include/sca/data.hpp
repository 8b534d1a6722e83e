#pragma once

// Process data containers, z-score scaling and the second-order expansion
// that feeds the SCA encoder.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// n variables x m samples. Every entry is finite.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(Matrix values, std::vector<std::string> variable_names = {});

  const Matrix& values() const { return values_; }
  const std::vector<std::string>& variable_names() const { return names_; }

  Index variables() const { return values_.rows(); }
  Index samples() const { return values_.cols(); }

  /// Columns [first, first + count).
  DataMatrix slice(Index first, Index count) const;

 private:
  Matrix values_;
  std::vector<std::string> names_;
};

struct Scaler {
  Vector mean;
  Vector std;  // strictly positive

  Index size() const { return mean.size(); }
};

/// Sample mean and sample std (divisor m-1). A std below 1e-12 becomes 1.
Scaler fit_scaler(const DataMatrix& x);

/// (x - mean) / std per variable.
DataMatrix apply_scaler(const Scaler& scaler, const DataMatrix& x);
Matrix apply_scaler(const Scaler& scaler, const Matrix& x);

/// x * std + mean per variable.
Matrix invert_scaler(const Scaler& scaler, const Matrix& scaled);

/// Rows [1, x_1..x_n, x_j*x_k for j, k in row-major order], N = 1 + n + n^2.
class ExpandedMatrix {
 public:
  ExpandedMatrix() = default;
  /// Wraps an arbitrary N x m design. source_n is informational; 0 means
  /// the rows were not produced by expand_second_order.
  explicit ExpandedMatrix(Matrix values, Index source_n = 0);

  const Matrix& values() const { return values_; }
  Index source_n() const { return source_n_; }
  Index rows() const { return values_.rows(); }
  Index samples() const { return values_.cols(); }

 private:
  Matrix values_;
  Index source_n_ = 0;
};

constexpr Index expanded_dimension(Index n) { return 1 + n + n * n; }

ExpandedMatrix expand_second_order(const DataMatrix& x);
Matrix expand_second_order(const Matrix& x);
Vector expand_sample(const Eigen::Ref<const Vector>& x);

}  // namespace sca
