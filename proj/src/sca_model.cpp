#include "sca/sca_model.hpp"

#include "sca/persist.hpp"

#include <stdexcept>
#include <string>

namespace sca {

DetectionReport monitor_with(const Detector& model, const DataMatrix& x) {
  if (x.variables() != model.variables()) {
    throw std::invalid_argument(std::string(model.method()) + " model expects n = " +
                                std::to_string(model.variables()) + " variables, data has " +
                                std::to_string(x.variables()));
  }
  return detect_features(model.monitor(), model.features(x.values()));
}

ScaModel::ScaModel(Scaler scaler, Matrix w, StiefelPoint w_tilde, Activations activations,
                   MonitorStats stats)
    : scaler_(std::move(scaler)),
      w_(std::move(w)),
      w_tilde_(std::move(w_tilde)),
      activations_(activations),
      stats_(std::move(stats)) {
  if (w_.rows() != expanded_dimension(scaler_.size()) || w_.rows() != w_tilde_.rows() ||
      w_.cols() != w_tilde_.cols()) {
    throw std::invalid_argument("ScaModel: parameter shapes do not match n = " +
                                std::to_string(scaler_.size()));
  }
  if (stats_.sigma_g_inv.rows() != w_.cols()) {
    throw std::invalid_argument("ScaModel: covariance size does not match p");
  }
}

Matrix ScaModel::features(const Matrix& raw) const {
  if (raw.rows() != variables()) {
    throw std::invalid_argument("sca model expects n = " + std::to_string(variables()) +
                                " variables, got " + std::to_string(raw.rows()));
  }
  const Matrix expanded = expand_second_order(apply_scaler(scaler_, raw));
  return activate(activations_.encoder, w_.transpose() * expanded);
}

ScaModel train(const DataMatrix& x_train, Index p, const CgConfig& cfg,
               const ScaTrainOptions& opts) {
  const Index m = x_train.samples();
  const Index big_n = expanded_dimension(x_train.variables());
  if (p < 1 || p > big_n) {
    throw std::invalid_argument("train: p must lie in [1, " + std::to_string(big_n) + "]");
  }
  if (m < p + 2) {
    throw std::invalid_argument("train: need at least p + 2 = " + std::to_string(p + 2) +
                                " samples, got " + std::to_string(m));
  }
  Scaler scaler = fit_scaler(x_train);
  const ExpandedMatrix expanded = expand_second_order(apply_scaler(scaler, x_train));
  CgResult fit = cg_optimize(initial_point(big_n, p, cfg.seed), expanded, cfg, opts.activations);

  const Matrix g = activate(opts.activations.encoder, fit.point.w.transpose() * expanded.values());
  MonitorStats stats = fit_monitor(g, opts.monitor);
  ScaModel model(std::move(scaler), std::move(fit.point.w), std::move(fit.point.w_tilde),
                 opts.activations, std::move(stats));
  model.set_trace(std::move(fit.trace));
  return model;
}

Vector encode(const ScaModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.variables()) {
    throw std::invalid_argument("encode: sample has " + std::to_string(x.size()) +
                                " variables, model expects " + std::to_string(model.variables()));
  }
  const Vector scaled = (x - model.scaler().mean).cwiseQuotient(model.scaler().std);
  const Vector z = model.w().transpose() * expand_sample(scaled);
  return activate(model.activations().encoder, z);
}

double t2(const ScaModel& model, const Eigen::Ref<const Vector>& g) {
  const MonitorStats& s = model.monitor();
  if (s.feature_mean.size() == g.size()) return t2(s.sigma_g_inv, g - s.feature_mean);
  return t2(s.sigma_g_inv, g);
}

DetectionReport detect(const ScaModel& model, const DataMatrix& x_new) {
  return monitor_with(model, x_new);
}

void ScaModel::store(ModelEnvelope& env) const {
  env.set("n", static_cast<long long>(variables()));
  env.set("p", static_cast<long long>(p()));
  env.set("encoder", std::string(activation_name(activations_.encoder)));
  env.set("decoder", std::string(activation_name(activations_.decoder)));
  store_scaler(env, scaler_);
  env.set_matrix("w", w_);
  env.set_matrix("w_tilde", w_tilde_.matrix());
  store_monitor(env, stats_);
}

ScaModel ScaModel::load(const ModelEnvelope& env) {
  Activations act{parse_activation(env.get_string("encoder")),
                  parse_activation(env.get_string("decoder"))};
  return ScaModel(load_scaler(env), env.matrix("w"), StiefelPoint(env.matrix("w_tilde")), act,
                  load_monitor(env));
}

}  // namespace sca
