#include "sca/bench.hpp"

#include "sca/sca_model.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace sca {

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string two_decimals(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

const std::set<std::string>& known_methods() {
  static const std::set<std::string> m{"pca", "kpca", "ae", "sae", "sca"};
  return m;
}

}  // namespace

void BenchSpec::validate() const {
  if (cases.empty()) throw std::invalid_argument("bench: no test files given");
  if (methods.empty()) throw std::invalid_argument("bench: no methods given");
  for (const auto& m : methods) {
    if (!known_methods().count(m)) throw std::invalid_argument("bench: unknown method '" + m + "'");
  }
  if (!std::filesystem::exists(train_path)) {
    throw std::invalid_argument("bench: training file not found: " + train_path.string());
  }
  for (const auto& c : cases) {
    if (!std::filesystem::exists(c.test_path)) {
      throw std::invalid_argument("bench: test file not found: " + c.test_path.string());
    }
    if (c.normal_count < 1) throw std::invalid_argument("bench: normal_count must be >= 1");
  }
  if (p && *p < 1) throw std::invalid_argument("bench: p must be >= 1");
}

std::uint64_t method_seed(std::uint64_t seed, const std::string& method) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char ch : method) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed ^ h;  // splitmix64 finalizer
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

TrainedMethod train_method(const std::string& method, const DataMatrix& train, Index p,
                           const BenchSpec& spec) {
  const MonitorOptions mon{spec.zeta, spec.reading, true};
  const std::uint64_t seed = method_seed(spec.seed, method);
  const auto started = std::chrono::steady_clock::now();
  TrainedMethod out;
  if (method == "pca") {
    out.model = std::make_unique<PcaModel>(pca_fit(train, p, mon));
  } else if (method == "kpca") {
    out.model = std::make_unique<KpcaModel>(kpca_fit(train, p, mon));
  } else if (method == "ae" || method == "sae") {
    AeConfig cfg = spec.ae;
    cfg.seed = seed;
    cfg.activations = spec.activations;
    AeModel model = method == "ae" ? ae_train(train, p, cfg, mon) : sae_train(train, p, cfg, mon);
    out.trace = model.trace();
    out.model = std::make_unique<AeModel>(std::move(model));
  } else if (method == "sca") {
    CgConfig cfg = spec.cg;
    cfg.seed = seed;
    ScaModel model = sca::train(train, p, cfg, {spec.activations, mon});
    out.trace = model.trace();
    out.model = std::make_unique<ScaModel>(std::move(model));
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  out.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

void write_chart_csv(const std::filesystem::path& path, const DetectionReport& report,
                     Index normal_count) {
  std::ofstream out = open_out(path);
  out << "index,t2,tau,label,flag\n";
  const std::string tau = shortest(report.tau);
  for (std::size_t i = 0; i < report.t2.size(); ++i) {
    out << i << ',' << shortest(report.t2[i]) << ',' << tau << ','
        << (static_cast<Index>(i) < normal_count ? 0 : 1) << ',' << (report.flags[i] ? 1 : 0)
        << '\n';
  }
}

void write_chart_svg(const std::filesystem::path& path, const DetectionReport& report,
                     Index normal_count, const std::string& title) {
  constexpr double kW = 800, kH = 400, kLeft = 60, kRight = 20, kTop = 30, kBottom = 40;
  const std::size_t n = report.t2.size();
  double ymax = report.tau;
  for (double v : report.t2) ymax = std::max(ymax, v);
  ymax = ymax > 0.0 ? ymax * 1.05 : 1.0;
  auto sx = [&](std::size_t i) {
    return kLeft + (kW - kLeft - kRight) * (n > 1 ? double(i) / double(n - 1) : 0.0);
  };
  auto sy = [&](double v) { return kTop + (kH - kTop - kBottom) * (1.0 - v / ymax); };

  std::ofstream out = open_out(path);
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
      << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kH - kBottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft - 5 << "\" y=\"" << kTop + 5
      << "\" text-anchor=\"end\" font-size=\"10\">" << ymax << "</text>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">sample</text>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const bool normal = static_cast<Index>(i) < normal_count;
    out << "<circle cx=\"" << sx(i) << "\" cy=\"" << sy(report.t2[i]) << "\" r=\"1.5\" fill=\""
        << (normal ? "blue" : "red") << "\"/>\n";
  }
  out << "<line x1=\"" << kLeft << "\" y1=\"" << sy(report.tau) << "\" x2=\"" << kW - kRight
      << "\" y2=\"" << sy(report.tau)
      << "\" stroke=\"black\" stroke-dasharray=\"4,3\"/>\n</svg>\n";
}

void write_metrics_csv(const std::filesystem::path& path, const BenchResult& r) {
  std::ofstream out = open_out(path);
  out << "fault_id,method,mdr,far\n";
  for (const auto& c : r.cells) {
    out << c.fault_id << ',' << c.method << ',';
    if (c.rates) {
      out << two_decimals(c.rates->mdr) << ',' << two_decimals(c.rates->far) << '\n';
    } else {
      out << "NA,NA\n";
    }
  }
}

void write_table_csv(const std::filesystem::path& path, const BenchResult& r,
                     const std::vector<std::string>& methods) {
  std::ofstream out = open_out(path);
  out << "fault_id";
  for (const auto& m : methods) out << ',' << m << "_mdr," << m << "_far";
  out << '\n';
  std::vector<std::string> faults;
  for (const auto& c : r.cells) {
    if (std::find(faults.begin(), faults.end(), c.fault_id) == faults.end()) {
      faults.push_back(c.fault_id);
    }
  }
  for (const auto& f : faults) {
    out << f;
    for (const auto& m : methods) {
      const auto it = std::find_if(r.cells.begin(), r.cells.end(), [&](const BenchCell& c) {
        return c.fault_id == f && c.method == m;
      });
      if (it != r.cells.end() && it->rates) {
        out << ',' << two_decimals(it->rates->mdr) << ',' << two_decimals(it->rates->far);
      } else {
        out << ",NA,NA";
      }
    }
    out << '\n';
  }
}

BenchResult run_bench(const BenchSpec& spec) {
  spec.validate();
  const auto started = std::chrono::steady_clock::now();
  std::filesystem::create_directories(spec.out_dir / "charts");

  const DataMatrix train = load_csv(spec.train_path, spec.train_layout);
  std::vector<DataMatrix> tests;
  tests.reserve(spec.cases.size());
  for (const auto& c : spec.cases) tests.push_back(load_csv(c.test_path, spec.test_layout));

  BenchResult result;
  if (spec.p) {
    result.p = *spec.p;
  } else {
    const PcaModel probe = pca_fit(train, Energy{spec.energy}, {spec.zeta, spec.reading, true});
    result.p = probe.p();
  }

  nlohmann::json meta;
  meta["seed"] = spec.seed;
  meta["p"] = result.p;
  meta["p_source"] = spec.p ? "explicit" : "pca_energy";
  meta["energy"] = spec.energy;
  meta["zeta"] = spec.zeta;
  meta["limit_reading"] = std::string(limit_reading_name(spec.reading));
  meta["train_path"] = spec.train_path.string();
  meta["methods"] = spec.methods;
  meta["encoder"] = std::string(activation_name(spec.activations.encoder));
  meta["decoder"] = std::string(activation_name(spec.activations.decoder));
  meta["cg"] = {{"max_iters", spec.cg.max_iters},       {"grad_tol", spec.cg.grad_tol},
                {"cost_rel_tol", spec.cg.cost_rel_tol}, {"armijo_c1", spec.cg.armijo_c1},
                {"backtrack_factor", spec.cg.backtrack_factor},
                {"initial_step", spec.cg.initial_step}};
  meta["ae"] = {{"epochs", spec.ae.epochs},
                {"learning_rate", spec.ae.learning_rate},
                {"tol", spec.ae.tol}};
  meta["kpca_features"] = "whitened: v * sqrt(m - 1) / lambda";

  for (const auto& method : spec.methods) {
    TrainedMethod trained;
    try {
      trained = train_method(method, train, result.p, spec);
    } catch (const std::exception& e) {
      result.failures[method] = e.what();
      for (const auto& c : spec.cases) result.cells.push_back({c.fault_id, method, {}, e.what()});
      meta["methods_detail"][method] = {{"error", e.what()}};
      continue;
    }
    result.train_seconds[method] = trained.train_seconds;
    nlohmann::json detail{{"train_seconds", trained.train_seconds},
                          {"tau", trained.model->monitor().tau},
                          {"bandwidth", trained.model->monitor().bandwidth}};
    if (trained.trace) {
      write_trace_csv(spec.out_dir / ("trace_" + method + ".csv"), *trained.trace);
      detail["iterations"] = trained.trace->iterations;
      detail["stop_reason"] = std::string(stop_reason_name(trained.trace->stop_reason));
    }
    meta["methods_detail"][method] = detail;

    for (std::size_t k = 0; k < spec.cases.size(); ++k) {
      const FaultCase& c = spec.cases[k];
      BenchCell cell{c.fault_id, method, {}, {}};
      try {
        DetectionReport report = monitor_with(*trained.model, tests[k]);
        score(report, c.normal_count);
        cell.rates = Rates{report.mdr, report.far};
        const auto stem = method + "_fault" + c.fault_id;
        write_chart_csv(spec.out_dir / "charts" / (stem + ".csv"), report, c.normal_count);
        if (spec.svg) {
          write_chart_svg(spec.out_dir / "charts" / (stem + ".svg"), report, c.normal_count,
                          method + " fault " + c.fault_id);
        }
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      result.cells.push_back(std::move(cell));
    }
  }

  write_metrics_csv(spec.out_dir / "metrics.csv", result);
  write_table_csv(spec.out_dir / "table.csv", result, spec.methods);
  meta["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ofstream(spec.out_dir / "run.json") << meta.dump(2) << '\n';
  return result;
}

}  // namespace sca
