#pragma once

// Second-order component analysis: tanh encoder over the second-order
// expansion, orthonormal decoder, T^2 monitoring of the encoder output.

#include "sca/activation.hpp"
#include "sca/detector.hpp"
#include "sca/manifold.hpp"
#include "sca/optimizer.hpp"

#include <optional>

namespace sca {

struct ScaTrainOptions {
  Activations activations;
  MonitorOptions monitor;
};

class ScaModel final : public Detector {
 public:
  ScaModel(Scaler scaler, Matrix w, StiefelPoint w_tilde, Activations activations,
           MonitorStats stats);

  std::string_view method() const override { return "sca"; }
  Index variables() const override { return scaler_.size(); }
  Matrix features(const Matrix& raw) const override;
  const MonitorStats& monitor() const override { return stats_; }
  void store(ModelEnvelope& env) const override;
  static ScaModel load(const ModelEnvelope& env);

  const Scaler& scaler() const { return scaler_; }
  const Matrix& w() const { return w_; }
  const StiefelPoint& w_tilde() const { return w_tilde_; }
  const Activations& activations() const { return activations_; }
  Index p() const { return w_.cols(); }

  /// Set by train(); absent for loaded models.
  const std::optional<CgTrace>& trace() const { return trace_; }
  void set_trace(CgTrace t) { trace_ = std::move(t); }

  /// For boundary experiments only.
  void override_tau(double tau) { stats_.tau = tau; }

 private:
  Scaler scaler_;
  Matrix w_;
  StiefelPoint w_tilde_;
  Activations activations_;
  MonitorStats stats_;
  std::optional<CgTrace> trace_;
};

/// Offline procedure: scale, expand, optimize on St x E, fit the T^2 limit.
ScaModel train(const DataMatrix& x_train, Index p, const CgConfig& cfg,
               const ScaTrainOptions& opts = {});

/// g = enc(W^T expand(scale(x))) for one raw sample.
Vector encode(const ScaModel& model, const Eigen::Ref<const Vector>& x);

double t2(const ScaModel& model, const Eigen::Ref<const Vector>& g);

/// Online procedure over the columns of x_new.
DetectionReport detect(const ScaModel& model, const DataMatrix& x_new);

}  // namespace sca
