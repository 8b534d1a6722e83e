#pragma once

// Comparison methods sharing the T^2 / KDE monitoring: PCA, Gaussian-kernel
// PCA, a single-hidden-layer autoencoder (AE) and its second-order variant
// (SAE). None of them carries an orthogonality constraint on a decoder.

#include "sca/activation.hpp"
#include "sca/detector.hpp"
#include "sca/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace sca {

/// Either a fixed dimension or a cumulative eigenvalue fraction.
struct Energy {
  double fraction = 0.85;
};
using Dimension = std::variant<Index, Energy>;

/// Smallest k whose leading eigenvalues hold at least `fraction` of the sum.
Index dimension_for_energy(const Vector& eigenvalues_desc, double fraction);

class PcaModel final : public Detector {
 public:
  PcaModel(Scaler scaler, Matrix loading, Vector eigenvalues, MonitorStats stats);

  std::string_view method() const override { return "pca"; }
  Index variables() const override { return scaler_.size(); }
  Matrix features(const Matrix& raw) const override;
  const MonitorStats& monitor() const override { return stats_; }
  void store(ModelEnvelope& env) const override;
  static PcaModel load(const ModelEnvelope& env);

  const Scaler& scaler() const { return scaler_; }
  /// n x p, orthonormal columns, descending eigenvalue order.
  const Matrix& loading() const { return loading_; }
  /// All n covariance eigenvalues, descending.
  const Vector& eigenvalues() const { return eigenvalues_; }
  Index p() const { return loading_.cols(); }

 private:
  Scaler scaler_;
  Matrix loading_;
  Vector eigenvalues_;
  MonitorStats stats_;
};

PcaModel pca_fit(const DataMatrix& x, Dimension dim, const MonitorOptions& opts = {});

class KpcaModel final : public Detector {
 public:
  KpcaModel(Scaler scaler, Matrix train_scaled, Matrix alpha, Vector eigenvalues, double width,
            MonitorStats stats);

  std::string_view method() const override { return "kpca"; }
  Index variables() const override { return scaler_.size(); }
  Matrix features(const Matrix& raw) const override;
  const MonitorStats& monitor() const override { return stats_; }
  void store(ModelEnvelope& env) const override;
  static KpcaModel load(const ModelEnvelope& env);

  /// exp(-||a - b||^2 / c) between the columns of a and b.
  static Matrix kernel(const Matrix& a, const Matrix& b, double width);

  double width() const { return width_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  /// m x p projection coefficients, v_k * sqrt(m - 1) / lambda_k.
  const Matrix& alpha() const { return alpha_; }

 private:
  Scaler scaler_;
  Matrix train_;  // n x m scaled training samples
  Matrix alpha_;
  Vector eigenvalues_;
  double width_;
  Vector kernel_col_mean_;
  double kernel_mean_ = 0.0;
  MonitorStats stats_;
};

/// Double-centred Gram matrix K - 1K - K1 + 1K1.
Matrix center_gram(const Matrix& k);

/// Gaussian-kernel PCA. The width c = 10 n mean(std) of the scaled data is
/// used when width is empty.
KpcaModel kpca_fit(const DataMatrix& x, Index p, const MonitorOptions& opts = {},
                   std::optional<double> width = std::nullopt);

struct AeConfig {
  int epochs = 1000;
  double learning_rate = 0.1;  // divided by the sample count
  double tol = 1e-7;           // relative cost change over 10 epochs
  std::uint64_t seed = 0;
  Activations activations;
};

struct AeParams {
  Matrix w;      // in x p
  Vector b;      // p
  Matrix w_dec;  // in x p
  Vector b_dec;  // in
};

/// sum_i ||x_i - dec(W_dec enc(W^T x_i + b) + b_dec)||^2 and its gradient.
struct AeCostAndGrad {
  double cost = 0.0;
  AeParams grad;
};
double ae_cost(const AeParams& params, const Matrix& x, const Activations& act);
AeCostAndGrad ae_cost_and_grad(const AeParams& params, const Matrix& x, const Activations& act);

struct AeFit {
  AeParams params;
  CgTrace trace;
};

/// Full-batch gradient descent; a step that raises the cost is rejected and
/// the step length halved.
AeFit ae_optimize(const Matrix& x, Index p, const AeConfig& cfg);

class AeModel final : public Detector {
 public:
  AeModel(Scaler scaler, bool second_order, AeParams params, Activations activations,
          MonitorStats stats);

  std::string_view method() const override { return second_order_ ? "sae" : "ae"; }
  Index variables() const override { return scaler_.size(); }
  Matrix features(const Matrix& raw) const override;
  const MonitorStats& monitor() const override { return stats_; }
  void store(ModelEnvelope& env) const override;
  static AeModel load(const ModelEnvelope& env);

  const AeParams& params() const { return params_; }
  bool second_order() const { return second_order_; }
  Index input_dimension() const { return params_.w.rows(); }

  const std::optional<CgTrace>& trace() const { return trace_; }
  void set_trace(CgTrace t) { trace_ = std::move(t); }

 private:
  Scaler scaler_;
  bool second_order_;
  AeParams params_;
  Activations activations_;
  MonitorStats stats_;
  std::optional<CgTrace> trace_;
};

AeModel ae_train(const DataMatrix& x, Index p, const AeConfig& cfg,
                 const MonitorOptions& opts = {});
/// ae_train over expand_second_order(scaled x).
AeModel sae_train(const DataMatrix& x, Index p, const AeConfig& cfg,
                  const MonitorOptions& opts = {});

}  // namespace sca
