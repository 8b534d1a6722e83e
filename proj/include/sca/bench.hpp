#pragma once

// Benchmark orchestration: train each method once on normal data, monitor
// every fault case, and emit metric tables, monitoring charts, convergence
// traces and run metadata.

#include "sca/baselines.hpp"
#include "sca/csv.hpp"
#include "sca/detector.hpp"
#include "sca/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sca {

struct FaultCase {
  std::string fault_id;
  std::filesystem::path test_path;
  Index normal_count = 160;
};

struct BenchSpec {
  std::filesystem::path train_path;
  std::vector<FaultCase> cases;
  std::vector<std::string> methods{"pca", "kpca", "ae", "sae", "sca"};
  std::optional<Index> p;  // energy rule on PCA when absent
  double energy = 0.85;
  double zeta = 0.01;
  LimitReading reading = LimitReading::Coverage;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "bench_out";
  CsvLayout train_layout;
  CsvLayout test_layout;
  bool svg = false;
  CgConfig cg;
  AeConfig ae;
  Activations activations;

  void validate() const;
};

/// Per-(seed, method) stream seed; stable across runs and platforms.
std::uint64_t method_seed(std::uint64_t seed, const std::string& method);

struct TrainedMethod {
  std::unique_ptr<Detector> model;
  std::optional<CgTrace> trace;
  double train_seconds = 0.0;
};

/// Trains one of pca | kpca | ae | sae | sca on already-loaded data.
TrainedMethod train_method(const std::string& method, const DataMatrix& train, Index p,
                           const BenchSpec& spec);

struct BenchCell {
  std::string fault_id;
  std::string method;
  std::optional<Rates> rates;  // empty when the method failed
  std::string error;
};

struct BenchResult {
  Index p = 0;
  std::vector<BenchCell> cells;
  std::map<std::string, double> train_seconds;
  std::map<std::string, std::string> failures;
};

BenchResult run_bench(const BenchSpec& spec);

/// fault_id,method,mdr,far with two decimals, NA for failed cells.
void write_metrics_csv(const std::filesystem::path& path, const BenchResult& r);
/// One row per fault, an (mdr, far) column pair per method.
void write_table_csv(const std::filesystem::path& path, const BenchResult& r,
                     const std::vector<std::string>& methods);
/// index,t2,tau,label,flag
void write_chart_csv(const std::filesystem::path& path, const DetectionReport& report,
                     Index normal_count);
void write_chart_svg(const std::filesystem::path& path, const DetectionReport& report,
                     Index normal_count, const std::string& title);

}  // namespace sca
