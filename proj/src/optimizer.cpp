#include "sca/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

namespace sca {

namespace {

constexpr double kDenominatorGuard = 1e-18;

void check_shapes(const ProductPoint& point, const ExpandedMatrix& x) {
  if (point.w.rows() != x.rows() || point.w_tilde.rows() != x.rows() ||
      point.w.cols() != point.w_tilde.cols()) {
    throw std::invalid_argument("cost: parameters are " + std::to_string(point.w.rows()) + "x" +
                                std::to_string(point.w.cols()) + " but data has " +
                                std::to_string(x.rows()) + " rows");
  }
}

struct Forward {
  Matrix pre_hidden;  // W^T X
  Matrix hidden;      // G
  Matrix pre_out;     // W~ G
  Matrix out;
  double cost = 0.0;
};

Forward forward(const ProductPoint& point, const ExpandedMatrix& x, const Activations& act) {
  check_shapes(point, x);
  Forward f;
  f.pre_hidden.noalias() = point.w.transpose() * x.values();
  f.hidden = activate(act.encoder, f.pre_hidden);
  f.pre_out.noalias() = point.w_tilde.matrix() * f.hidden;
  f.out = activate(act.decoder, f.pre_out);
  f.cost = (f.out - x.values()).squaredNorm();
  if (!std::isfinite(f.cost)) throw NumericalError("cost: non-finite reconstruction error");
  return f;
}

}  // namespace

double cost(const ProductPoint& point, const ExpandedMatrix& x, const Activations& act) {
  return forward(point, x, act).cost;
}

CostAndGrad cost_and_grad(const ProductPoint& point, const ExpandedMatrix& x,
                          const Activations& act) {
  const Forward f = forward(point, x, act);
  Matrix d = 2.0 * (f.out - x.values());
  if (act.decoder != Activation::Identity) {
    d.array() *= activate_derivative(act.decoder, f.pre_out, f.out).array();
  }
  CostAndGrad r;
  r.cost = f.cost;
  r.grad.dh.noalias() = d * f.hidden.transpose();
  Matrix back = point.w_tilde.matrix().transpose() * d;
  if (act.encoder != Activation::Identity) {
    back.array() *= activate_derivative(act.encoder, f.pre_hidden, f.hidden).array();
  }
  r.grad.dw.noalias() = x.values() * back.transpose();
  if (!r.grad.dw.allFinite() || !r.grad.dh.allFinite()) {
    throw NumericalError("gradient: non-finite entries");
  }
  return r;
}

EuclideanGrad euclidean_grad(const ProductPoint& point, const ExpandedMatrix& x,
                             const Activations& act) {
  return cost_and_grad(point, x, act).grad;
}

void CgConfig::validate() const {
  if (max_iters < 0) throw std::invalid_argument("CgConfig: max_iters must be >= 0");
  if (!(grad_tol >= 0.0)) throw std::invalid_argument("CgConfig: grad_tol must be >= 0");
  if (!(cost_rel_tol >= 0.0)) throw std::invalid_argument("CgConfig: cost_rel_tol must be >= 0");
  if (cost_window < 1) throw std::invalid_argument("CgConfig: cost_window must be >= 1");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) {
    throw std::invalid_argument("CgConfig: armijo_c1 must lie in (0, 1)");
  }
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw std::invalid_argument("CgConfig: backtrack_factor must lie in (0, 1)");
  }
  if (!(initial_step > 0.0)) throw std::invalid_argument("CgConfig: initial_step must be > 0");
  if (max_backtracks < 1) throw std::invalid_argument("CgConfig: max_backtracks must be >= 1");
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::GradientTolerance: return "gradient_tolerance";
    case StopReason::CostStalled: return "cost_stalled";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::LineSearchFailure: return "line_search_failure";
  }
  return "unknown";
}

void write_trace_csv(const std::filesystem::path& path, const CgTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iter,cost,grad_norm\n";
  out.precision(17);
  for (std::size_t k = 0; k < trace.cost_per_iter.size(); ++k) {
    out << k << ',' << trace.cost_per_iter[k] << ',' << trace.grad_norm_per_iter[k] << '\n';
  }
}

LineSearchResult line_search(const ProductPoint& point, double cost_at_point,
                             const TangentPair& direction, double slope,
                             const ExpandedMatrix& x, const CgConfig& cfg,
                             const Activations& act, double trial_step) {
  if (!(slope < 0.0)) {
    throw std::invalid_argument("line_search: direction is not a descent direction (slope " +
                                std::to_string(slope) + ")");
  }
  double t = trial_step > 0.0 ? trial_step : cfg.initial_step;
  for (int k = 0; k <= cfg.max_backtracks; ++k, t *= cfg.backtrack_factor) {
    ProductPoint trial = retract(point, direction, t);
    double f = 0.0;
    try {
      f = cost(trial, x, act);
    } catch (const NumericalError&) {
      continue;
    }
    if (f <= cost_at_point + cfg.armijo_c1 * t * slope) {
      return {t, std::move(trial), f, k};
    }
  }
  throw LineSearchFailure("line_search: no Armijo step within " +
                          std::to_string(cfg.max_backtracks) + " backtracks");
}

LineSearchResult line_search(const ProductPoint& point, const TangentPair& direction,
                             const ExpandedMatrix& x, const CgConfig& cfg,
                             const Activations& act) {
  const CostAndGrad cg = cost_and_grad(point, x, act);
  const TangentPair grad = riemannian_grad(point, cg.grad);
  return line_search(point, cg.cost, direction, inner(grad, direction), x, cfg, act);
}

CgResult cg_optimize(const ProductPoint& init, const ExpandedMatrix& x, const CgConfig& cfg,
                     const Activations& act, const IterateObserver& observer) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();

  CgResult res{init, {}};
  ProductPoint& point = res.point;
  CgTrace& trace = res.trace;

  CostAndGrad cg = cost_and_grad(point, x, act);
  double f = cg.cost;
  TangentPair grad = riemannian_grad(point, cg.grad);
  double grad_norm = norm(grad);
  TangentPair dir = -grad;
  trace.cost_per_iter.push_back(f);
  trace.grad_norm_per_iter.push_back(grad_norm);

  double prev_step = 0.0;
  double prev_slope = 0.0;
  int prev_backtracks = 0;

  for (int k = 0; k < cfg.max_iters; ++k) {
    if (grad_norm <= cfg.grad_tol) {
      trace.stop_reason = StopReason::GradientTolerance;
      break;
    }
    double slope = inner(grad, dir);
    if (!(slope < 0.0)) {
      dir = -grad;
      slope = -grad_norm * grad_norm;
      ++trace.restarts;
    }

    // First trial: a step of length initial_step, afterwards the previous
    // step rescaled by the slope ratio (doubled when it needed no backtracking).
    double trial = cfg.initial_step / std::sqrt(-slope);
    if (prev_step > 0.0) {
      trial = prev_step * prev_slope / slope;
      if (prev_backtracks == 0) trial *= 2.0;
    }

    LineSearchResult ls;
    try {
      ls = line_search(point, f, dir, slope, x, cfg, act, trial);
    } catch (const LineSearchFailure&) {
      const bool steepest = (dir.dw + grad.dw).norm() == 0.0 && (dir.dh + grad.dh).norm() == 0.0;
      bool recovered = false;
      if (!steepest) {
        dir = -grad;
        slope = -grad_norm * grad_norm;
        ++trace.restarts;
        try {
          ls = line_search(point, f, dir, slope, x, cfg, act, cfg.initial_step / grad_norm);
          recovered = true;
        } catch (const LineSearchFailure&) {
        }
      }
      if (!recovered) {
        trace.stop_reason = StopReason::LineSearchFailure;
        break;
      }
    }

    prev_step = ls.step;
    prev_slope = slope;
    prev_backtracks = ls.backtracks;
    point = std::move(ls.point);
    if (observer) observer(point, ls.cost);
    ++trace.iterations;

    cg = cost_and_grad(point, x, act);
    f = cg.cost;
    TangentPair new_grad = riemannian_grad(point, cg.grad);
    const TangentPair moved_dir = transport(point.w_tilde, dir);
    const TangentPair moved_grad = transport(point.w_tilde, grad);

    // PR+ coefficient; the denominator is -<H, G> of the transported pair.
    const double denom = inner(moved_dir, moved_grad);
    double beta = 0.0;
    if (denom < -kDenominatorGuard) {
      const TangentPair diff{new_grad.dw - moved_grad.dw, new_grad.dh - moved_grad.dh};
      beta = std::max(0.0, inner(new_grad, diff) / -denom);
    }
    grad = std::move(new_grad);
    grad_norm = norm(grad);
    if (beta > 0.0) {
      dir = -grad + beta * moved_dir;
      if (!(inner(grad, dir) < 0.0)) {
        dir = -grad;
        ++trace.restarts;
      }
    } else {
      dir = -grad;
      ++trace.restarts;
    }

    trace.cost_per_iter.push_back(f);
    trace.grad_norm_per_iter.push_back(grad_norm);

    const std::size_t last = trace.cost_per_iter.size() - 1;
    if (last >= static_cast<std::size_t>(cfg.cost_window)) {
      const double before = trace.cost_per_iter[last - cfg.cost_window];
      if (std::abs(before - f) <= cfg.cost_rel_tol * std::abs(before)) {
        trace.stop_reason = StopReason::CostStalled;
        break;
      }
    }
    if (k + 1 == cfg.max_iters) trace.stop_reason = StopReason::MaxIterations;
  }
  if (cfg.max_iters == 0 && grad_norm <= cfg.grad_tol) {
    trace.stop_reason = StopReason::GradientTolerance;
  }

  trace.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return res;
}

ProductPoint initial_point(Index n_rows, Index p, std::uint64_t seed) {
  if (p < 1 || p > n_rows) {
    throw std::invalid_argument("initial_point: need 1 <= p <= N");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_rows));
  Matrix w(n_rows, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n_rows; ++i) w(i, j) = scale * normal(rng);
  }
  Matrix a(n_rows, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n_rows; ++i) a(i, j) = normal(rng);
  }
  return ProductPoint(std::move(w), StiefelPoint::orthonormalize(a));
}

}  // namespace sca
