#include "sca/toy.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sca {

Eigen::Vector3d toy_process(double t1, double t2, const Eigen::Vector3d& e) {
  return {t1 + e[0],
          t1 * t1 * t1 - 4.5 * t2 * t2 + 6.0 * t1 + t2 + e[1],
          3.0 * std::pow(t1, 4) - t2 * t2 * t2 + 3.0 * t2 * t2 + e[2]};
}

namespace {

Matrix draw(std::mt19937_64& rng, Index count, double noise_sd, double shift) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(3, count);
  for (Index i = 0; i < count; ++i) {
    const double t1 = normal(rng);
    const double t2 = normal(rng);
    Eigen::Vector3d e;
    for (int k = 0; k < 3; ++k) e[k] = noise_sd * normal(rng);
    out.col(i) = toy_process(t1, t2, e).array() + shift;
  }
  return out;
}

}  // namespace

ToyData generate_toy(const ToyConfig& cfg) {
  if (cfg.train_m < 1 || cfg.normal_m < 1 || cfg.fault_m < 1) {
    throw std::invalid_argument("generate_toy: sample counts must be positive");
  }
  if (!(cfg.train_noise >= 0.0) || !(cfg.test_noise >= 0.0)) {
    throw std::invalid_argument("generate_toy: noise parameters must be non-negative");
  }
  const double train_sd = cfg.noise_as_sd ? cfg.train_noise : std::sqrt(cfg.train_noise);
  const double test_sd = cfg.noise_as_sd ? cfg.test_noise : std::sqrt(cfg.test_noise);
  std::mt19937_64 rng(cfg.seed);
  Matrix train = draw(rng, cfg.train_m, train_sd, 0.0);
  Matrix test(3, cfg.normal_m + cfg.fault_m);
  test.leftCols(cfg.normal_m) = draw(rng, cfg.normal_m, test_sd, 0.0);
  test.rightCols(cfg.fault_m) = draw(rng, cfg.fault_m, test_sd, cfg.fault_shift);
  return {DataMatrix(std::move(train)), DataMatrix(std::move(test))};
}

}  // namespace sca
