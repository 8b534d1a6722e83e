#include "sca/data.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sca {

namespace {

constexpr double kStdFloor = 1e-12;

void require_finite(const Matrix& m, const char* what) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) {
        throw std::invalid_argument(std::string(what) + ": non-finite entry at variable " +
                                    std::to_string(i) + ", sample " + std::to_string(j));
      }
    }
  }
}

}  // namespace

DataMatrix::DataMatrix(Matrix values, std::vector<std::string> variable_names)
    : values_(std::move(values)), names_(std::move(variable_names)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw std::invalid_argument("DataMatrix: need at least one variable and one sample");
  }
  if (!names_.empty() && static_cast<Index>(names_.size()) != values_.rows()) {
    throw std::invalid_argument("DataMatrix: " + std::to_string(names_.size()) +
                                " names for " + std::to_string(values_.rows()) + " variables");
  }
  require_finite(values_, "DataMatrix");
}

DataMatrix DataMatrix::slice(Index first, Index count) const {
  if (first < 0 || count < 1 || first + count > samples()) {
    throw std::out_of_range("DataMatrix::slice: range outside sample count");
  }
  return DataMatrix(values_.middleCols(first, count), names_);
}

Scaler fit_scaler(const DataMatrix& x) {
  const Index m = x.samples();
  if (m < 2) {
    throw std::invalid_argument("fit_scaler: need at least 2 samples, got " + std::to_string(m));
  }
  Scaler s;
  s.mean = x.values().rowwise().mean();
  const Matrix centered = x.values().colwise() - s.mean;
  s.std = (centered.rowwise().squaredNorm() / static_cast<double>(m - 1)).cwiseSqrt();
  for (Index j = 0; j < s.std.size(); ++j) {
    if (s.std[j] < kStdFloor) s.std[j] = 1.0;
  }
  return s;
}

Matrix apply_scaler(const Scaler& scaler, const Matrix& x) {
  if (x.rows() != scaler.size()) {
    throw std::invalid_argument("apply_scaler: data has " + std::to_string(x.rows()) +
                                " variables, scaler expects " + std::to_string(scaler.size()));
  }
  return (x.colwise() - scaler.mean).array().colwise() / scaler.std.array();
}

DataMatrix apply_scaler(const Scaler& scaler, const DataMatrix& x) {
  return DataMatrix(apply_scaler(scaler, x.values()), x.variable_names());
}

Matrix invert_scaler(const Scaler& scaler, const Matrix& scaled) {
  if (scaled.rows() != scaler.size()) {
    throw std::invalid_argument("invert_scaler: dimension mismatch");
  }
  Matrix out = scaled.array().colwise() * scaler.std.array();
  out.colwise() += scaler.mean;
  return out;
}

ExpandedMatrix::ExpandedMatrix(Matrix values, Index source_n)
    : values_(std::move(values)), source_n_(source_n) {
  if (source_n_ > 0 && values_.rows() != expanded_dimension(source_n_)) {
    throw std::invalid_argument("ExpandedMatrix: row count does not match 1 + n + n^2");
  }
}

Vector expand_sample(const Eigen::Ref<const Vector>& x) {
  const Index n = x.size();
  Vector out(expanded_dimension(n));
  out[0] = 1.0;
  out.segment(1, n) = x;
  Index k = 1 + n;
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) out[k++] = x[a] * x[b];
  }
  return out;
}

Matrix expand_second_order(const Matrix& x) {
  require_finite(x, "expand_second_order");
  const Index n = x.rows();
  const Index m = x.cols();
  Matrix out(expanded_dimension(n), m);
  out.row(0).setOnes();
  out.middleRows(1, n) = x;
  for (Index a = 0; a < n; ++a) {
    out.middleRows(1 + n + a * n, n) = x.array().rowwise() * x.row(a).array();
  }
  return out;
}

ExpandedMatrix expand_second_order(const DataMatrix& x) {
  return ExpandedMatrix(expand_second_order(x.values()), x.variables());
}

}  // namespace sca
