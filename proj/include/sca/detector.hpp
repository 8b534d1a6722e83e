#pragma once

#include "sca/data.hpp"
#include "sca/monitor.hpp"

#include <string_view>

namespace sca {

class ModelEnvelope;

/// A fitted feature extractor plus its T^2 monitoring statistics.
class Detector {
 public:
  virtual ~Detector() = default;

  virtual std::string_view method() const = 0;
  /// Number of raw process variables the model was trained on.
  virtual Index variables() const = 0;
  /// p x m features of raw (unscaled) samples, one per column.
  virtual Matrix features(const Matrix& raw) const = 0;
  virtual const MonitorStats& monitor() const = 0;
  virtual void store(ModelEnvelope& env) const = 0;

  Index feature_dimension() const { return monitor().sigma_g_inv.rows(); }
};

/// Per-sample T^2 and alarm flags. MDR/FAR are left at zero; see score().
DetectionReport monitor_with(const Detector& model, const DataMatrix& x);

}  // namespace sca
