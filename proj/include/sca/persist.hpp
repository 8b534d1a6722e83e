#pragma once

// Versioned, self-describing text envelope for fitted models:
//
//   sca-model 1
//   method <tag>
//   <key> <value>            (one scalar or word per line)
//   matrix <name> <rows> <cols>
//   <rows lines of cols shortest round-trip decimals>
//   end
//
// Decimals are written with std::to_chars, so a load reproduces every
// double bit-for-bit.

#include "sca/data.hpp"
#include "sca/detector.hpp"
#include "sca/monitor.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

namespace sca {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelEnvelope {
 public:
  static constexpr int kVersion = 1;

  explicit ModelEnvelope(std::string method = {}) : method_(std::move(method)) {}

  const std::string& method() const { return method_; }

  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set_matrix(const std::string& name, Matrix value);

  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  const Matrix& matrix(const std::string& name) const;
  Vector vector(const std::string& name) const;
  bool has(const std::string& key) const { return fields_.count(key) != 0; }

  void write(std::ostream& out) const;
  static ModelEnvelope read(std::istream& in);

 private:
  std::string method_;
  std::map<std::string, std::string> fields_;
  std::map<std::string, Matrix> matrices_;
};

void store_scaler(ModelEnvelope& env, const Scaler& s);
Scaler load_scaler(const ModelEnvelope& env);
void store_monitor(ModelEnvelope& env, const MonitorStats& s);
MonitorStats load_monitor(const ModelEnvelope& env);

void save_model(const std::filesystem::path& path, const Detector& model);
/// Dispatches on the method tag.
std::unique_ptr<Detector> load_model(const std::filesystem::path& path);
std::unique_ptr<Detector> model_from_envelope(const ModelEnvelope& env);

}  // namespace sca
