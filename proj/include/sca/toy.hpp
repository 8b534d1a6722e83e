#pragma once

// Heteroscedastic three-variable toy process:
//   x1 = t1 + e1
//   x2 = t1^3 - 4.5 t2^2 + 6 t1 + t2 + e2
//   x3 = 3 t1^4 - t2^3 + 3 t2^2 + e3
// with t1, t2 ~ N(0, 1). Faulty samples add a constant shift to every x_i.

#include "sca/data.hpp"

#include <cstdint>

namespace sca {

struct ToyConfig {
  std::uint64_t seed = 0;
  Index train_m = 500;
  Index normal_m = 100;
  Index fault_m = 400;
  double train_noise = 0.1;  // variance of e_i unless noise_as_sd
  double test_noise = 0.5;
  bool noise_as_sd = false;
  double fault_shift = 1.0;
};

Eigen::Vector3d toy_process(double t1, double t2, const Eigen::Vector3d& e);

struct ToyData {
  DataMatrix train;
  DataMatrix test;  // normal_m normal samples, then fault_m faulty ones
};

ToyData generate_toy(const ToyConfig& cfg);

}  // namespace sca
