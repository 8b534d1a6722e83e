#include "sca/monitor.hpp"

#include "sca/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sca {

namespace {

constexpr int kGridPoints = 4096;
constexpr double kRidge = 1e-8;
constexpr double kGridReach = 5.0;  // bandwidths beyond the extreme samples

double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string_view limit_reading_name(LimitReading r) {
  return r == LimitReading::Coverage ? "coverage" : "raw";
}

LimitReading parse_limit_reading(std::string_view name) {
  if (name == "coverage") return LimitReading::Coverage;
  if (name == "raw") return LimitReading::Raw;
  throw std::invalid_argument("limit reading must be 'coverage' or 'raw', got '" +
                              std::string(name) + "'");
}

Matrix feature_covariance_inverse(const Matrix& features) {
  const Index p = features.rows();
  const Index m = features.cols();
  if (p < 1 || m < 2) {
    throw std::invalid_argument("feature_covariance_inverse: need p >= 1 and m >= 2");
  }
  const Matrix centered = features.colwise() - features.rowwise().mean();
  Matrix cov = centered * centered.transpose() / static_cast<double>(m - 1);
  const double trace = cov.trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) {
    throw NumericalError("feature covariance is singular beyond ridge repair (zero trace)");
  }
  cov.diagonal().array() += kRidge * trace / static_cast<double>(p);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("feature covariance is singular beyond ridge repair");
  }
  const Matrix inv = llt.solve(Matrix::Identity(p, p));
  return 0.5 * (inv + inv.transpose());
}

double t2(const Matrix& sigma_g_inv, const Eigen::Ref<const Vector>& g) {
  if (g.size() != sigma_g_inv.rows()) {
    throw std::invalid_argument("t2: feature length " + std::to_string(g.size()) +
                                ", expected " + std::to_string(sigma_g_inv.rows()));
  }
  return std::max(0.0, g.dot(sigma_g_inv * g));
}

Vector t2_batch(const MonitorStats& stats, const Matrix& features) {
  if (features.rows() != stats.sigma_g_inv.rows()) {
    throw std::invalid_argument("t2: feature dimension " + std::to_string(features.rows()) +
                                ", expected " + std::to_string(stats.sigma_g_inv.rows()));
  }
  const Matrix centered = stats.feature_mean.size() == features.rows()
                              ? Matrix(features.colwise() - stats.feature_mean)
                              : features;
  const Matrix weighted = stats.sigma_g_inv * centered;
  Vector out = centered.cwiseProduct(weighted).colwise().sum().transpose();
  return out.cwiseMax(0.0);
}

double kde_pdf(std::span<const double> samples, double h, double query) {
  if (!(h > 0.0)) throw std::invalid_argument("kde_pdf: bandwidth must be positive");
  if (samples.empty()) throw std::invalid_argument("kde_pdf: no samples");
  double s = 0.0;
  for (double ti : samples) {
    const double u = (query - ti) / h;
    s += std::exp(-0.5 * u * u);
  }
  return s / (std::sqrt(2.0 * std::numbers::pi) * h * static_cast<double>(samples.size()));
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("silverman_bandwidth: no samples");
  const double sd = sample_std(samples);
  if (sd > 0.0) return 1.06 * sd * std::pow(static_cast<double>(samples.size()), -0.2);
  return 1e-6 * std::max(1.0, sample_mean(samples));
}

ControlLimit control_limit(std::span<const double> samples, double zeta, LimitReading reading) {
  if (!(zeta > 0.0 && zeta <= 0.5)) {
    throw std::invalid_argument("control_limit: zeta must lie in (0, 0.5]");
  }
  if (samples.size() < 10) {
    throw std::invalid_argument("control_limit: need at least 10 samples, got " +
                                std::to_string(samples.size()));
  }
  const double h = silverman_bandwidth(samples);
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - kGridReach * h;
  const double hi = *hi_it + kGridReach * h;
  const double dx = (hi - lo) / (kGridPoints - 1);
  const double target = reading == LimitReading::Coverage ? 1.0 - zeta : zeta;

  std::vector<double> density(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) density[i] = kde_pdf(samples, h, lo + i * dx);

  double cdf = 0.0;
  for (int i = 1; i < kGridPoints; ++i) {
    const double cell = 0.5 * dx * (density[i - 1] + density[i]);
    if (cdf + cell >= target) {
      // Trapezoid CDF inside the cell, solved by bisection.
      const double left = lo + (i - 1) * dx;
      double a = left;
      double b = left + dx;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (a + b);
        const double f = cdf + 0.5 * (mid - left) * (density[i - 1] + kde_pdf(samples, h, mid));
        (f < target ? a : b) = mid;
      }
      return {0.5 * (a + b), h};
    }
    cdf += cell;
  }
  return {hi, h};
}

MonitorStats fit_monitor(const Matrix& train_features, const MonitorOptions& opts) {
  MonitorStats s;
  s.zeta = opts.zeta;
  s.reading = opts.reading;
  s.feature_mean = opts.center_features ? Vector(train_features.rowwise().mean())
                                        : Vector::Zero(train_features.rows());
  s.sigma_g_inv = feature_covariance_inverse(train_features);
  s.t2_train = t2_batch(s, train_features);
  const ControlLimit cl =
      control_limit(std::span<const double>(s.t2_train.data(), s.t2_train.size()), opts.zeta,
                    opts.reading);
  s.bandwidth = cl.bandwidth;
  s.tau = cl.tau;
  return s;
}

DetectionReport detect_features(const MonitorStats& stats, const Matrix& features) {
  const Vector values = t2_batch(stats, features);
  DetectionReport r;
  r.tau = stats.tau;
  r.t2.assign(values.data(), values.data() + values.size());
  r.flags.reserve(r.t2.size());
  for (double v : r.t2) r.flags.push_back(v > stats.tau);
  return r;
}

Rates score(const std::vector<bool>& flags, Index normal_count) {
  const Index total = static_cast<Index>(flags.size());
  if (normal_count < 1 || normal_count >= total) {
    throw std::invalid_argument("score: need non-empty normal and fault segments (normal_count " +
                                std::to_string(normal_count) + ", samples " +
                                std::to_string(total) + ")");
  }
  Index false_alarms = 0;
  Index misses = 0;
  for (Index i = 0; i < total; ++i) {
    if (i < normal_count) {
      false_alarms += flags[i] ? 1 : 0;
    } else {
      misses += flags[i] ? 0 : 1;
    }
  }
  return {100.0 * static_cast<double>(misses) / static_cast<double>(total - normal_count),
          100.0 * static_cast<double>(false_alarms) / static_cast<double>(normal_count)};
}

void score(DetectionReport& report, Index normal_count) {
  const Rates r = score(report.flags, normal_count);
  report.mdr = r.mdr;
  report.far = r.far;
}

}  // namespace sca
