#include "sca/persist.hpp"

#include "sca/baselines.hpp"
#include "sca/sca_model.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sca {

namespace {

constexpr const char* kMagic = "sca-model";

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("model file: bad number '" + s + "' in " + context);
  }
  return v;
}

}  // namespace

void ModelEnvelope::set(const std::string& key, std::string value) {
  if (key == "matrix" || key == "end" || key == "method" ||
      value.find_first_of(" \t\n") != std::string::npos) {
    throw std::invalid_argument("ModelEnvelope: invalid field '" + key + "'");
  }
  fields_[key] = std::move(value);
}

void ModelEnvelope::set(const std::string& key, double value) { set(key, format_double(value)); }

void ModelEnvelope::set(const std::string& key, long long value) {
  set(key, std::to_string(value));
}

void ModelEnvelope::set_matrix(const std::string& name, Matrix value) {
  matrices_[name] = std::move(value);
}

const std::string& ModelEnvelope::get_string(const std::string& key) const {
  const auto it = fields_.find(key);
  if (it == fields_.end()) throw FormatError("model file: missing field '" + key + "'");
  return it->second;
}

double ModelEnvelope::get_double(const std::string& key) const {
  return parse_double(get_string(key), key);
}

long long ModelEnvelope::get_int(const std::string& key) const {
  const std::string& s = get_string(key);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("model file: bad integer '" + s + "' for " + key);
  }
  return v;
}

const Matrix& ModelEnvelope::matrix(const std::string& name) const {
  const auto it = matrices_.find(name);
  if (it == matrices_.end()) throw FormatError("model file: missing matrix '" + name + "'");
  return it->second;
}

Vector ModelEnvelope::vector(const std::string& name) const {
  const Matrix& m = matrix(name);
  if (m.cols() != 1) throw FormatError("model file: '" + name + "' is not a column vector");
  return m.col(0);
}

void ModelEnvelope::write(std::ostream& out) const {
  out << kMagic << ' ' << kVersion << '\n';
  out << "method " << method_ << '\n';
  for (const auto& [k, v] : fields_) out << k << ' ' << v << '\n';
  for (const auto& [name, m] : matrices_) {
    out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
      out << '\n';
    }
  }
  out << "end\n";
}

ModelEnvelope ModelEnvelope::read(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) {
    throw FormatError("not a model file (missing '" + std::string(kMagic) + "' header)");
  }
  if (version != kVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version));
  }
  std::string key;
  std::string method;
  if (!(in >> key >> method) || key != "method") throw FormatError("model file: missing method");
  ModelEnvelope env(method);
  while (in >> key) {
    if (key == "end") return env;
    if (key == "matrix") {
      std::string name;
      Index rows = 0;
      Index cols = 0;
      if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) {
        throw FormatError("model file: bad matrix header");
      }
      Matrix m(rows, cols);
      std::string tok;
      for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
          if (!(in >> tok)) throw FormatError("model file: truncated matrix '" + name + "'");
          m(i, j) = parse_double(tok, name);
        }
      }
      env.matrices_[name] = std::move(m);
      continue;
    }
    std::string value;
    if (!(in >> value)) throw FormatError("model file: field '" + key + "' has no value");
    env.fields_[key] = value;
  }
  throw FormatError("model file: missing 'end'");
}

void store_scaler(ModelEnvelope& env, const Scaler& s) {
  env.set_matrix("scaler_mean", s.mean);
  env.set_matrix("scaler_std", s.std);
}

Scaler load_scaler(const ModelEnvelope& env) {
  Scaler s{env.vector("scaler_mean"), env.vector("scaler_std")};
  if (s.mean.size() != s.std.size() || (s.std.array() <= 0.0).any()) {
    throw FormatError("model file: invalid scaler");
  }
  return s;
}

void store_monitor(ModelEnvelope& env, const MonitorStats& s) {
  env.set("zeta", s.zeta);
  env.set("h", s.bandwidth);
  env.set("tau", s.tau);
  env.set("limit_reading", std::string(limit_reading_name(s.reading)));
  env.set_matrix("sigma_g_inv", s.sigma_g_inv);
  env.set_matrix("feature_mean", s.feature_mean);
  env.set_matrix("t2_train", s.t2_train);
}

MonitorStats load_monitor(const ModelEnvelope& env) {
  MonitorStats s;
  s.zeta = env.get_double("zeta");
  s.bandwidth = env.get_double("h");
  s.tau = env.get_double("tau");
  s.reading = parse_limit_reading(env.get_string("limit_reading"));
  s.sigma_g_inv = env.matrix("sigma_g_inv");
  s.feature_mean = env.vector("feature_mean");
  s.t2_train = env.vector("t2_train");
  if (s.sigma_g_inv.rows() != s.sigma_g_inv.cols() ||
      s.feature_mean.size() != s.sigma_g_inv.rows()) {
    throw FormatError("model file: inconsistent monitoring statistics");
  }
  return s;
}

void save_model(const std::filesystem::path& path, const Detector& model) {
  ModelEnvelope env{std::string(model.method())};
  model.store(env);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  env.write(out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::unique_ptr<Detector> model_from_envelope(const ModelEnvelope& env) {
  const std::string& m = env.method();
  if (m == "sca") return std::make_unique<ScaModel>(ScaModel::load(env));
  if (m == "pca") return std::make_unique<PcaModel>(PcaModel::load(env));
  if (m == "kpca") return std::make_unique<KpcaModel>(KpcaModel::load(env));
  if (m == "ae" || m == "sae") return std::make_unique<AeModel>(AeModel::load(env));
  throw FormatError("model file: unknown method '" + m + "'");
}

std::unique_ptr<Detector> load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return model_from_envelope(ModelEnvelope::read(in));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace sca
