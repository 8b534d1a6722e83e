#pragma once

// Posterior P(y = 0 | x) for two isotropic Gaussian classes with equal
// priors, written as 1 / (1 + (s0/s1)^n exp(a x^T x - b^T x + c)).

#include <filesystem>
#include <vector>

namespace sca {

struct GaussianPair {
  double mu0 = 0.0;
  double mu1 = 1.0;
  double sd0 = 1.0;
  double sd1 = 1.0;
};

struct LogOddsCoefficients {
  double a = 0.0;  // 1/(2 s0^2) - 1/(2 s1^2)
  double b = 0.0;  // mu0/s0^2 - mu1/s1^2
  double c = 0.0;  // mu0^2/(2 s0^2) - mu1^2/(2 s1^2)
};

LogOddsCoefficients log_odds_coefficients(const GaussianPair& g);

/// One-dimensional posterior of class 0.
double posterior_class0(const GaussianPair& g, double x);

struct BayesPoint {
  double x;
  double posterior;
};

/// count >= 2 evenly spaced points on [lo, hi].
std::vector<BayesPoint> bayes_curve(const GaussianPair& g, double lo, double hi, int count);

void write_bayes_csv(const std::filesystem::path& path, const std::vector<BayesPoint>& curve);

}  // namespace sca
