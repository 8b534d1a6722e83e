#pragma once

// Reconstruction cost f(W, W~) = ||X - dec(W~ enc(W^T X))||_F^2 and the
// geometric conjugate gradient method on St(N, p) x E(N, p).

#include "sca/activation.hpp"
#include "sca/data.hpp"
#include "sca/errors.hpp"
#include "sca/manifold.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string_view>
#include <vector>

namespace sca {

struct CostAndGrad {
  double cost = 0.0;
  EuclideanGrad grad;
};

double cost(const ProductPoint& point, const ExpandedMatrix& x, const Activations& act = {});

/// With G = enc(W^T X), E = dec(W~ G) - X, D = 2 E .* dec'(W~ G):
/// df/dW~ = D G^T and df/dW = X (enc'(W^T X) .* (W~^T D))^T.
EuclideanGrad euclidean_grad(const ProductPoint& point, const ExpandedMatrix& x,
                             const Activations& act = {});
CostAndGrad cost_and_grad(const ProductPoint& point, const ExpandedMatrix& x,
                          const Activations& act = {});

struct CgConfig {
  int max_iters = 500;
  double grad_tol = 1e-5;
  double cost_rel_tol = 1e-9;
  int cost_window = 5;  // iterations spanned by the cost_rel_tol test
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  int max_backtracks = 60;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class StopReason { GradientTolerance, CostStalled, MaxIterations, LineSearchFailure };
std::string_view stop_reason_name(StopReason r);

struct CgTrace {
  std::vector<double> cost_per_iter;  // entry 0 is the initial cost
  std::vector<double> grad_norm_per_iter;
  int iterations = 0;
  int restarts = 0;
  double wall_time = 0.0;  // seconds
  StopReason stop_reason = StopReason::MaxIterations;
};

/// iter,cost,grad_norm
void write_trace_csv(const std::filesystem::path& path, const CgTrace& trace);

struct LineSearchResult {
  double step = 0.0;
  ProductPoint point;
  double cost = 0.0;
  int backtracks = 0;
};

/// Armijo backtracking along t -> (W + t dw, R(W~, t dh)) starting from
/// trial_step (cfg.initial_step when <= 0). slope = <grad, direction> must be
/// negative. Throws LineSearchFailure after cfg.max_backtracks reductions.
LineSearchResult line_search(const ProductPoint& point, double cost_at_point,
                             const TangentPair& direction, double slope,
                             const ExpandedMatrix& x, const CgConfig& cfg,
                             const Activations& act = {}, double trial_step = 0.0);

/// Convenience overload that evaluates the cost and gradient at point.
LineSearchResult line_search(const ProductPoint& point, const TangentPair& direction,
                             const ExpandedMatrix& x, const CgConfig& cfg,
                             const Activations& act = {});

struct CgResult {
  ProductPoint point;
  CgTrace trace;
};

/// Called with every accepted iterate and its cost.
using IterateObserver = std::function<void(const ProductPoint&, double)>;

CgResult cg_optimize(const ProductPoint& init, const ExpandedMatrix& x, const CgConfig& cfg,
                     const Activations& act = {}, const IterateObserver& observer = {});

/// W ~ N(0, 1/N) entries, W~ = orthonormal factor of a Gaussian N x p matrix.
ProductPoint initial_point(Index n_rows, Index p, std::uint64_t seed);

}  // namespace sca
