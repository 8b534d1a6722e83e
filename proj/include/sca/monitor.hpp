#pragma once

// Hotelling-type T^2 monitoring shared by every feature extractor: feature
// covariance, Gaussian KDE control limit, alarm flags and MDR/FAR scoring.

#include "sca/data.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace sca {

/// How the KDE integral from 0 to tau is matched against zeta.
enum class LimitReading {
  Coverage,  // integral = 1 - zeta (99% limit at zeta = 0.01)
  Raw,       // integral = zeta, the literal reading
};

std::string_view limit_reading_name(LimitReading r);
LimitReading parse_limit_reading(std::string_view name);

/// Everything the online T^2 test needs, fitted on training features.
struct MonitorStats {
  Vector feature_mean;    // training feature mean, or zero without centering
  Matrix sigma_g_inv;     // p x p, symmetric
  Vector t2_train;
  double bandwidth = 0.0;
  double tau = 0.0;
  double zeta = 0.01;
  LimitReading reading = LimitReading::Coverage;
};

struct MonitorOptions {
  double zeta = 0.01;
  LimitReading reading = LimitReading::Coverage;
  bool center_features = true;  // subtract the training feature mean before T^2
};

/// Sample covariance (divisor m-1) of the p x m feature matrix with a ridge
/// of 1e-8 * trace / p, inverted and symmetrized.
Matrix feature_covariance_inverse(const Matrix& features);

/// g^T S g with S = sigma_g_inv.
double t2(const Matrix& sigma_g_inv, const Eigen::Ref<const Vector>& g);
Vector t2_batch(const MonitorStats& stats, const Matrix& features);

/// Gaussian kernel density estimate at query.
double kde_pdf(std::span<const double> samples, double h, double query);

/// 1.06 * sd * N^{-1/5}; falls back to 1e-6 * max(1, mean) for a zero spread.
double silverman_bandwidth(std::span<const double> samples);

struct ControlLimit {
  double tau = 0.0;
  double bandwidth = 0.0;
};

/// tau with KDE probability mass below tau equal to 1 - zeta (Coverage) or
/// zeta (Raw). Trapezoid CDF on a 4096-point grid, bisection inside the
/// bracketing cell.
ControlLimit control_limit(std::span<const double> samples, double zeta,
                           LimitReading reading = LimitReading::Coverage);

MonitorStats fit_monitor(const Matrix& train_features, const MonitorOptions& opts);

struct DetectionReport {
  std::vector<double> t2;
  std::vector<bool> flags;  // t2 > tau
  double tau = 0.0;
  double mdr = 0.0;  // percent
  double far = 0.0;  // percent
};

DetectionReport detect_features(const MonitorStats& stats, const Matrix& features);

struct Rates {
  double mdr = 0.0;
  double far = 0.0;
};

/// The first normal_count flags are normal samples, the rest faulty.
Rates score(const std::vector<bool>& flags, Index normal_count);
void score(DetectionReport& report, Index normal_count);

}  // namespace sca
