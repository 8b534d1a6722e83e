#include "sca/baselines.hpp"

#include "sca/persist.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace sca {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr int kAeWindow = 10;
constexpr int kMaxHalvings = 60;

void require_variables(const Scaler& s, const Matrix& raw, std::string_view method) {
  if (raw.rows() != s.size()) {
    throw std::invalid_argument(std::string(method) + " model expects n = " +
                                std::to_string(s.size()) + " variables, got " +
                                std::to_string(raw.rows()));
  }
}

/// Eigenpairs of a symmetric matrix in descending order.
std::pair<Vector, Matrix> descending_eigen(const Matrix& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": eigendecomposition failed");
  }
  return {eig.eigenvalues().reverse(), eig.eigenvectors().rowwise().reverse()};
}

}  // namespace

Index dimension_for_energy(const Vector& eigenvalues_desc, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("energy fraction must lie in (0, 1]");
  }
  const Vector clipped = eigenvalues_desc.cwiseMax(0.0);
  const double total = clipped.sum();
  if (!(total > 0.0)) throw NumericalError("energy rule: eigenvalues sum to zero");
  double acc = 0.0;
  for (Index k = 0; k < clipped.size(); ++k) {
    acc += clipped[k];
    // Relative slack so that an exact 85% split is not lost to rounding.
    if (acc >= fraction * total * (1.0 - 1e-12)) return k + 1;
  }
  return clipped.size();
}

// ---------------------------------------------------------------- PCA

PcaModel::PcaModel(Scaler scaler, Matrix loading, Vector eigenvalues, MonitorStats stats)
    : scaler_(std::move(scaler)),
      loading_(std::move(loading)),
      eigenvalues_(std::move(eigenvalues)),
      stats_(std::move(stats)) {
  if (loading_.rows() != scaler_.size() || stats_.sigma_g_inv.rows() != loading_.cols()) {
    throw std::invalid_argument("PcaModel: inconsistent shapes");
  }
}

Matrix PcaModel::features(const Matrix& raw) const {
  require_variables(scaler_, raw, method());
  return loading_.transpose() * apply_scaler(scaler_, raw);
}

PcaModel pca_fit(const DataMatrix& x, Dimension dim, const MonitorOptions& opts) {
  Scaler scaler = fit_scaler(x);
  const Matrix z = apply_scaler(scaler, x.values());
  const Matrix centered = z.colwise() - z.rowwise().mean();
  const Matrix cov = centered * centered.transpose() / static_cast<double>(x.samples() - 1);
  auto [values, vectors] = descending_eigen(cov, "pca_fit");

  const Index p = std::holds_alternative<Index>(dim)
                      ? std::get<Index>(dim)
                      : dimension_for_energy(values, std::get<Energy>(dim).fraction);
  if (p < 1 || p > z.rows()) {
    throw std::invalid_argument("pca_fit: p must lie in [1, " + std::to_string(z.rows()) + "]");
  }
  if (!(values[p - 1] > kRankTolerance * std::max(1.0, values[0]))) {
    throw NumericalError("pca_fit: covariance rank is below p = " + std::to_string(p));
  }
  Matrix loading = vectors.leftCols(p);
  MonitorStats stats = fit_monitor(loading.transpose() * z, opts);
  return PcaModel(std::move(scaler), std::move(loading), std::move(values), std::move(stats));
}

void PcaModel::store(ModelEnvelope& env) const {
  env.set("n", static_cast<long long>(variables()));
  env.set("p", static_cast<long long>(p()));
  store_scaler(env, scaler_);
  env.set_matrix("loading", loading_);
  env.set_matrix("eigenvalues", eigenvalues_);
  store_monitor(env, stats_);
}

PcaModel PcaModel::load(const ModelEnvelope& env) {
  return PcaModel(load_scaler(env), env.matrix("loading"), env.vector("eigenvalues"),
                  load_monitor(env));
}

// --------------------------------------------------------------- KPCA

Matrix KpcaModel::kernel(const Matrix& a, const Matrix& b, double width) {
  const Vector an = a.colwise().squaredNorm().transpose();
  const Vector bn = b.colwise().squaredNorm().transpose();
  Matrix d2 = -2.0 * a.transpose() * b;
  d2.colwise() += an;
  d2.rowwise() += bn.transpose();
  return (-(d2.array().max(0.0)) / width).exp().matrix();
}

Matrix center_gram(const Matrix& k) {
  const Vector col_mean = k.colwise().mean().transpose();
  const Vector row_mean = k.rowwise().mean();
  Matrix c = k;
  c.rowwise() -= col_mean.transpose();
  c.colwise() -= row_mean;
  c.array() += k.mean();
  return c;
}

KpcaModel::KpcaModel(Scaler scaler, Matrix train_scaled, Matrix alpha, Vector eigenvalues,
                     double width, MonitorStats stats)
    : scaler_(std::move(scaler)),
      train_(std::move(train_scaled)),
      alpha_(std::move(alpha)),
      eigenvalues_(std::move(eigenvalues)),
      width_(width),
      stats_(std::move(stats)) {
  if (train_.rows() != scaler_.size() || alpha_.rows() != train_.cols() ||
      alpha_.cols() != eigenvalues_.size() || !(width_ > 0.0)) {
    throw std::invalid_argument("KpcaModel: inconsistent shapes");
  }
  const Matrix k = kernel(train_, train_, width_);
  kernel_col_mean_ = k.colwise().mean().transpose();
  kernel_mean_ = k.mean();
}

Matrix KpcaModel::features(const Matrix& raw) const {
  require_variables(scaler_, raw, method());
  // Rows: new samples; columns: training samples.
  Matrix k = kernel(apply_scaler(scaler_, raw), train_, width_).eval();
  const Vector row_mean = k.rowwise().mean();
  k.rowwise() -= kernel_col_mean_.transpose();
  k.colwise() -= row_mean;
  k.array() += kernel_mean_;
  return (k * alpha_).transpose();
}

KpcaModel kpca_fit(const DataMatrix& x, Index p, const MonitorOptions& opts,
                   std::optional<double> width) {
  const Index m = x.samples();
  if (p < 1 || m < p + 1) {
    throw std::invalid_argument("kpca_fit: need 1 <= p and m >= p + 1");
  }
  Scaler scaler = fit_scaler(x);
  Matrix z = apply_scaler(scaler, x.values());
  double c = 0.0;
  if (width) {
    c = *width;
  } else {
    const Matrix centered = z.colwise() - z.rowwise().mean();
    const Vector sd =
        (centered.rowwise().squaredNorm() / static_cast<double>(m - 1)).cwiseSqrt();
    const double mean_sd = sd.mean();
    c = 10.0 * static_cast<double>(z.rows()) * (mean_sd > 0.0 ? mean_sd : 1.0);
  }
  if (!(c > 0.0)) throw std::invalid_argument("kpca_fit: kernel width must be positive");

  const Matrix kc = center_gram(KpcaModel::kernel(z, z, c));
  auto [values, vectors] = descending_eigen(kc, "kpca_fit");
  if (!(values[p - 1] > kRankTolerance * std::max(1.0, values[0]))) {
    throw NumericalError("kpca_fit: p = " + std::to_string(p) +
                         " exceeds the numerically positive rank of the centred Gram matrix");
  }
  Vector lambda = values.head(p);
  Matrix alpha = vectors.leftCols(p);
  const double scale = std::sqrt(static_cast<double>(m - 1));
  for (Index k = 0; k < p; ++k) alpha.col(k) *= scale / lambda[k];

  const Matrix g = (kc * alpha).transpose();
  MonitorStats stats = fit_monitor(g, opts);
  return KpcaModel(std::move(scaler), std::move(z), std::move(alpha), std::move(lambda), c,
                   std::move(stats));
}

void KpcaModel::store(ModelEnvelope& env) const {
  env.set("n", static_cast<long long>(variables()));
  env.set("p", static_cast<long long>(alpha_.cols()));
  env.set("kernel_width", width_);
  env.set("whitened", std::string("true"));
  store_scaler(env, scaler_);
  env.set_matrix("train_scaled", train_);
  env.set_matrix("alpha", alpha_);
  env.set_matrix("eigenvalues", eigenvalues_);
  store_monitor(env, stats_);
}

KpcaModel KpcaModel::load(const ModelEnvelope& env) {
  return KpcaModel(load_scaler(env), env.matrix("train_scaled"), env.matrix("alpha"),
                   env.vector("eigenvalues"), env.get_double("kernel_width"), load_monitor(env));
}

// ----------------------------------------------------------------- AE

namespace {

struct AeForward {
  Matrix pre_hidden;
  Matrix hidden;
  Matrix pre_out;
  Matrix out;
  double cost = 0.0;
};

AeForward ae_forward(const AeParams& prm, const Matrix& x, const Activations& act) {
  if (prm.w.rows() != x.rows() || prm.w_dec.rows() != x.rows() || prm.b_dec.size() != x.rows() ||
      prm.b.size() != prm.w.cols() || prm.w_dec.cols() != prm.w.cols()) {
    throw std::invalid_argument("ae_cost: parameter shapes do not match the data");
  }
  AeForward f;
  f.pre_hidden = prm.w.transpose() * x;
  f.pre_hidden.colwise() += prm.b;
  f.hidden = activate(act.encoder, f.pre_hidden);
  f.pre_out = prm.w_dec * f.hidden;
  f.pre_out.colwise() += prm.b_dec;
  f.out = activate(act.decoder, f.pre_out);
  f.cost = (f.out - x).squaredNorm();
  return f;
}

double params_norm_sq(const AeParams& g) {
  return g.w.squaredNorm() + g.b.squaredNorm() + g.w_dec.squaredNorm() + g.b_dec.squaredNorm();
}

AeParams step(const AeParams& p, const AeParams& g, double lr) {
  return {p.w - lr * g.w, p.b - lr * g.b, p.w_dec - lr * g.w_dec, p.b_dec - lr * g.b_dec};
}

}  // namespace

double ae_cost(const AeParams& params, const Matrix& x, const Activations& act) {
  return ae_forward(params, x, act).cost;
}

AeCostAndGrad ae_cost_and_grad(const AeParams& params, const Matrix& x, const Activations& act) {
  const AeForward f = ae_forward(params, x, act);
  Matrix d = 2.0 * (f.out - x);
  if (act.decoder != Activation::Identity) {
    d.array() *= activate_derivative(act.decoder, f.pre_out, f.out).array();
  }
  Matrix back = params.w_dec.transpose() * d;
  if (act.encoder != Activation::Identity) {
    back.array() *= activate_derivative(act.encoder, f.pre_hidden, f.hidden).array();
  }
  AeCostAndGrad r;
  r.cost = f.cost;
  r.grad.w_dec = d * f.hidden.transpose();
  r.grad.b_dec = d.rowwise().sum();
  r.grad.w = x * back.transpose();
  r.grad.b = back.rowwise().sum();
  return r;
}

AeFit ae_optimize(const Matrix& x, Index p, const AeConfig& cfg) {
  const Index in = x.rows();
  const Index m = x.cols();
  if (p < 1 || m < 2) throw std::invalid_argument("ae_train: need p >= 1 and m >= 2");
  if (cfg.epochs < 0 || !(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("ae_train: invalid configuration");
  }
  const auto started = std::chrono::steady_clock::now();

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(in)));
  AeFit fit;
  AeParams& prm = fit.params;
  prm.w = Matrix::NullaryExpr(in, p, [&] { return normal(rng); });
  prm.w_dec = Matrix::NullaryExpr(in, p, [&] { return normal(rng); });
  prm.b = Vector::Zero(p);
  prm.b_dec = Vector::Zero(in);

  CgTrace& trace = fit.trace;
  double lr = cfg.learning_rate / static_cast<double>(m);
  AeCostAndGrad cg = ae_cost_and_grad(prm, x, cfg.activations);
  if (!std::isfinite(cg.cost)) throw NumericalError("ae_train: cost diverged");
  trace.cost_per_iter.push_back(cg.cost);
  trace.grad_norm_per_iter.push_back(std::sqrt(params_norm_sq(cg.grad)));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (trace.grad_norm_per_iter.back() <= 1e-12) {
      trace.stop_reason = StopReason::GradientTolerance;
      break;
    }
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, lr *= 0.5) {
      AeParams next = step(prm, cg.grad, lr);
      const double c = ae_cost(next, x, cfg.activations);
      if (std::isfinite(c) && c <= cg.cost) {
        prm = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      trace.stop_reason = StopReason::LineSearchFailure;
      break;
    }
    ++trace.iterations;
    cg = ae_cost_and_grad(prm, x, cfg.activations);
    if (!std::isfinite(cg.cost)) throw NumericalError("ae_train: cost diverged");
    trace.cost_per_iter.push_back(cg.cost);
    trace.grad_norm_per_iter.push_back(std::sqrt(params_norm_sq(cg.grad)));

    const std::size_t last = trace.cost_per_iter.size() - 1;
    if (last >= static_cast<std::size_t>(kAeWindow)) {
      const double before = trace.cost_per_iter[last - kAeWindow];
      if (before - cg.cost <= cfg.tol * before) {
        trace.stop_reason = StopReason::CostStalled;
        break;
      }
    }
    if (epoch + 1 == cfg.epochs) trace.stop_reason = StopReason::MaxIterations;
  }
  trace.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return fit;
}

AeModel::AeModel(Scaler scaler, bool second_order, AeParams params, Activations activations,
                 MonitorStats stats)
    : scaler_(std::move(scaler)),
      second_order_(second_order),
      params_(std::move(params)),
      activations_(activations),
      stats_(std::move(stats)) {
  const Index in = second_order_ ? expanded_dimension(scaler_.size()) : scaler_.size();
  if (params_.w.rows() != in || params_.w_dec.rows() != in || params_.b_dec.size() != in ||
      params_.b.size() != params_.w.cols() || stats_.sigma_g_inv.rows() != params_.w.cols()) {
    throw std::invalid_argument("AeModel: inconsistent shapes");
  }
}

Matrix AeModel::features(const Matrix& raw) const {
  require_variables(scaler_, raw, method());
  Matrix in = apply_scaler(scaler_, raw);
  if (second_order_) in = expand_second_order(in);
  Matrix z = params_.w.transpose() * in;
  z.colwise() += params_.b;
  return activate(activations_.encoder, z);
}

void AeModel::store(ModelEnvelope& env) const {
  env.set("n", static_cast<long long>(variables()));
  env.set("p", static_cast<long long>(params_.w.cols()));
  env.set("encoder", std::string(activation_name(activations_.encoder)));
  env.set("decoder", std::string(activation_name(activations_.decoder)));
  store_scaler(env, scaler_);
  env.set_matrix("w", params_.w);
  env.set_matrix("b", params_.b);
  env.set_matrix("w_dec", params_.w_dec);
  env.set_matrix("b_dec", params_.b_dec);
  store_monitor(env, stats_);
}

AeModel AeModel::load(const ModelEnvelope& env) {
  const Activations act{parse_activation(env.get_string("encoder")),
                        parse_activation(env.get_string("decoder"))};
  AeParams prm{env.matrix("w"), env.vector("b"), env.matrix("w_dec"), env.vector("b_dec")};
  return AeModel(load_scaler(env), env.method() == "sae", std::move(prm), act,
                 load_monitor(env));
}

namespace {

AeModel fit_autoencoder(const DataMatrix& x, Index p, const AeConfig& cfg,
                        const MonitorOptions& opts, bool second_order) {
  Scaler scaler = fit_scaler(x);
  Matrix in = apply_scaler(scaler, x.values());
  if (second_order) in = expand_second_order(in);
  AeFit fit = ae_optimize(in, p, cfg);
  Matrix z = fit.params.w.transpose() * in;
  z.colwise() += fit.params.b;
  MonitorStats stats = fit_monitor(activate(cfg.activations.encoder, z), opts);
  AeModel model(std::move(scaler), second_order, std::move(fit.params), cfg.activations,
                std::move(stats));
  model.set_trace(std::move(fit.trace));
  return model;
}

}  // namespace

AeModel ae_train(const DataMatrix& x, Index p, const AeConfig& cfg, const MonitorOptions& opts) {
  return fit_autoencoder(x, p, cfg, opts, false);
}

AeModel sae_train(const DataMatrix& x, Index p, const AeConfig& cfg, const MonitorOptions& opts) {
  return fit_autoencoder(x, p, cfg, opts, true);
}

}  // namespace sca
