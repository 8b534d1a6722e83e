// Command-line front-end: train / detect / gen-toy / bayes-demo / bench.

#include "sca/baselines.hpp"
#include "sca/bayes.hpp"
#include "sca/bench.hpp"
#include "sca/csv.hpp"
#include "sca/persist.hpp"
#include "sca/sca_model.hpp"
#include "sca/toy.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kUsageError = 2;

/// `--config FILE` is replaced by the --key value pairs of a flat key=value
/// file. They are placed before the remaining arguments so that explicit
/// flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> head;
  std::vector<std::string> config_args;
  std::vector<std::string> tail;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string file;
    if (a == "--config" && i + 1 < argc) {
      file = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      file = a.substr(9);
    } else {
      (head.empty() && a.rfind("-", 0) != 0 ? head : tail).push_back(a);
      continue;
    }
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config file " + file);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto f = s.find_first_not_of(" \t\r");
        if (f == std::string::npos) return std::string();
        return s.substr(f, s.find_last_not_of(" \t\r") - f + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value == "false") continue;
      config_args.push_back("--" + key);
      if (value != "true") config_args.push_back(value);
    }
  }
  std::vector<std::string> out{argv[0]};
  out.insert(out.end(), head.begin(), head.end());
  out.insert(out.end(), config_args.begin(), config_args.end());
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

struct Common {
  std::string samples = "rows";
  bool header = false;
  double zeta = 0.01;
  std::uint64_t seed = 0;
  std::string limit_reading = "coverage";

  sca::CsvLayout layout() const { return {sca::parse_sample_layout(samples), header}; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--samples", c.samples, "CSV layout: samples as rows or cols")
      ->check(CLI::IsMember({"rows", "cols"}));
  cmd->add_flag("--header", c.header, "first CSV line holds variable names");
  cmd->add_option("--zeta", c.zeta, "significance level of the T^2 limit");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--limit-reading", c.limit_reading,
                  "coverage: KDE mass below tau is 1 - zeta; raw: it is zeta")
      ->check(CLI::IsMember({"coverage", "raw"}));
}

struct TrainArgs {
  Common common;
  std::string method = "sca";
  std::string input;
  std::string out = "model.txt";
  std::optional<long> p;
  std::optional<double> energy;
  int max_iters = 500;
  int epochs = 1000;
  std::string encoder = "tanh";
  std::string decoder = "identity";
  std::string trace;
};

int run_train(const TrainArgs& a) {
  const sca::DataMatrix x = sca::load_csv(a.input, a.common.layout());
  sca::BenchSpec spec;
  spec.zeta = a.common.zeta;
  spec.seed = a.common.seed;
  spec.reading = sca::parse_limit_reading(a.common.limit_reading);
  spec.cg.max_iters = a.max_iters;
  spec.ae.epochs = a.epochs;
  spec.activations = {sca::parse_activation(a.encoder), sca::parse_activation(a.decoder)};

  sca::Index p = 0;
  if (a.p) {
    p = *a.p;
  } else {
    const double energy = a.energy.value_or(0.85);
    p = sca::pca_fit(x, sca::Energy{energy}, {a.common.zeta, spec.reading, true}).p();
    std::cerr << "p = " << p << " from the " << energy << " energy rule\n";
  }
  sca::TrainedMethod trained = sca::train_method(a.method, x, p, spec);
  sca::save_model(a.out, *trained.model);
  if (trained.trace && !a.trace.empty()) sca::write_trace_csv(a.trace, *trained.trace);

  const sca::MonitorStats& s = trained.model->monitor();
  std::cout << "method " << a.method << "\nn " << x.variables() << "\np " << p << "\ntau "
            << s.tau << "\nbandwidth " << s.bandwidth << "\ntrain_seconds "
            << trained.train_seconds << '\n';
  if (trained.trace) {
    std::cout << "iterations " << trained.trace->iterations << "\nfinal_cost "
              << trained.trace->cost_per_iter.back() << "\nstop_reason "
              << sca::stop_reason_name(trained.trace->stop_reason) << '\n';
  }
  std::cout << "model " << a.out << '\n';
  return 0;
}

struct DetectArgs {
  Common common;
  std::string model;
  std::string input;
  std::optional<long> normal_count;
  std::string out;
};

int run_detect(const DetectArgs& a) {
  const auto model = sca::load_model(a.model);
  const sca::DataMatrix x = sca::load_csv(a.input, a.common.layout());
  if (x.variables() != model->variables()) {
    std::cerr << "error: model expects n = " << model->variables() << " variables, "
              << a.input << " has " << x.variables() << '\n';
    return kUsageError;
  }
  const sca::DetectionReport report = sca::monitor_with(*model, x);
  if (!a.out.empty()) {
    sca::write_chart_csv(a.out, report, a.normal_count.value_or(0));
  }
  std::cout << "index,t2,flag\n";
  std::size_t alarms = 0;
  for (std::size_t i = 0; i < report.t2.size(); ++i) {
    std::cout << i << ',' << report.t2[i] << ',' << (report.flags[i] ? 1 : 0) << '\n';
    alarms += report.flags[i] ? 1 : 0;
  }
  std::cout << "# method " << model->method() << " tau " << report.tau << " alarms " << alarms
            << '/' << report.t2.size() << '\n';
  if (a.normal_count) {
    const long nc = *a.normal_count;
    if (nc >= static_cast<long>(report.flags.size())) {
      std::cout << "# far " << 100.0 * double(alarms) / double(report.flags.size()) << '\n';
    } else {
      const sca::Rates r = sca::score(report.flags, nc);
      std::cout << "# mdr " << r.mdr << " far " << r.far << '\n';
    }
  }
  return 0;
}

struct ToyArgs {
  sca::ToyConfig cfg;
  std::string out = ".";
};

int run_gen_toy(const ToyArgs& a) {
  const sca::ToyData data = sca::generate_toy(a.cfg);
  std::filesystem::create_directories(a.out);
  const auto train = std::filesystem::path(a.out) / "toy_train.csv";
  const auto test = std::filesystem::path(a.out) / "toy_test.csv";
  sca::save_csv(train, data.train);
  sca::save_csv(test, data.test);
  std::cout << train.string() << '\n' << test.string() << '\n';
  return 0;
}

struct BayesArgs {
  sca::GaussianPair g;
  double lo = -5.0;
  double hi = 5.0;
  int count = 201;
  std::string out = "bayes.csv";
};

int run_bayes(const BayesArgs& a) {
  sca::write_bayes_csv(a.out, sca::bayes_curve(a.g, a.lo, a.hi, a.count));
  std::cout << a.out << '\n';
  return 0;
}

struct BenchArgs {
  Common common;
  std::string train;
  std::vector<std::string> tests;
  long normal_count = 160;
  std::string methods = "pca,kpca,ae,sae,sca";
  std::optional<long> p;
  double energy = 0.85;
  std::string out = "bench_out";
  std::string train_samples;
  bool svg = false;
  int max_iters = 500;
  int epochs = 1000;
  std::string encoder = "tanh";
  std::string decoder = "identity";
};

int run_bench_cmd(const BenchArgs& a) {
  sca::BenchSpec spec;
  spec.train_path = a.train;
  spec.test_layout = a.common.layout();
  spec.train_layout = spec.test_layout;
  if (!a.train_samples.empty()) {
    spec.train_layout.samples = sca::parse_sample_layout(a.train_samples);
  }
  for (std::size_t i = 0; i < a.tests.size(); ++i) {
    const std::string& t = a.tests[i];
    const auto eq = t.find('=');
    sca::FaultCase c;
    c.fault_id = eq == std::string::npos ? std::to_string(i + 1) : t.substr(0, eq);
    c.test_path = eq == std::string::npos ? t : t.substr(eq + 1);
    c.normal_count = a.normal_count;
    spec.cases.push_back(std::move(c));
  }
  spec.methods.clear();
  std::stringstream ms(a.methods);
  for (std::string m; std::getline(ms, m, ',');) {
    if (!m.empty()) spec.methods.push_back(m);
  }
  if (a.p) spec.p = *a.p;
  spec.energy = a.energy;
  spec.zeta = a.common.zeta;
  spec.reading = sca::parse_limit_reading(a.common.limit_reading);
  spec.seed = a.common.seed;
  spec.out_dir = a.out;
  spec.svg = a.svg;
  spec.cg.max_iters = a.max_iters;
  spec.ae.epochs = a.epochs;
  spec.activations = {sca::parse_activation(a.encoder), sca::parse_activation(a.decoder)};

  const sca::BenchResult r = sca::run_bench(spec);
  std::cout << "p " << r.p << '\n';
  for (const auto& c : r.cells) {
    std::cout << c.fault_id << ' ' << c.method << ' ';
    if (c.rates) {
      std::cout << "mdr " << c.rates->mdr << " far " << c.rates->far << '\n';
    } else {
      std::cout << "NA (" << c.error << ")\n";
    }
  }
  std::cout << "outputs in " << spec.out_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order component analysis for process fault detection"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all");
  app.add_option("--config", "flat key=value file mirroring the flags");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "fit a model on normal data and save it");
  add_common(train, ta.common);
  train->add_option("--method", ta.method)->check(CLI::IsMember({"sca", "pca", "kpca", "ae", "sae"}));
  train->add_option("--input", ta.input, "training CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--out", ta.out, "model file");
  auto* p_opt = train->add_option("--p", ta.p, "feature dimension")->check(CLI::PositiveNumber);
  train->add_option("--energy", ta.energy, "PCA energy fraction used to pick p")->excludes(p_opt);
  train->add_option("--max-iters", ta.max_iters, "conjugate gradient iterations (sca)");
  train->add_option("--epochs", ta.epochs, "gradient descent epochs (ae, sae)");
  train->add_option("--encoder", ta.encoder)->check(CLI::IsMember({"tanh", "sigmoid", "identity"}));
  train->add_option("--decoder", ta.decoder)->check(CLI::IsMember({"tanh", "sigmoid", "identity"}));
  train->add_option("--trace", ta.trace, "write iter,cost,grad_norm CSV");

  DetectArgs da;
  auto* detect = app.add_subcommand("detect", "score samples against a saved model");
  add_common(detect, da.common);
  detect->add_option("--model", da.model)->required()->check(CLI::ExistingFile);
  detect->add_option("--input", da.input)->required()->check(CLI::ExistingFile);
  detect->add_option("--normal-count", da.normal_count, "leading normal samples, enables MDR/FAR");
  detect->add_option("--out", da.out, "chart CSV (index,t2,tau,label,flag)");

  ToyArgs ya;
  auto* toy = app.add_subcommand("gen-toy", "generate the heteroscedastic toy process");
  toy->add_option("--seed", ya.cfg.seed);
  toy->add_option("--train-m", ya.cfg.train_m)->check(CLI::PositiveNumber);
  toy->add_option("--normal-m", ya.cfg.normal_m)->check(CLI::PositiveNumber);
  toy->add_option("--fault-m", ya.cfg.fault_m)->check(CLI::PositiveNumber);
  toy->add_option("--train-noise", ya.cfg.train_noise, "noise variance of training data");
  toy->add_option("--test-noise", ya.cfg.test_noise, "noise variance of test data");
  toy->add_flag("--noise-as-sd", ya.cfg.noise_as_sd, "read noise parameters as std deviations");
  toy->add_option("--fault-shift", ya.cfg.fault_shift);
  toy->add_option("--out", ya.out, "output directory");

  BayesArgs ba;
  auto* bayes = app.add_subcommand("bayes-demo", "posterior of two Gaussian classes on a grid");
  bayes->add_option("--mu0", ba.g.mu0);
  bayes->add_option("--mu1", ba.g.mu1);
  bayes->add_option("--sd0", ba.g.sd0)->check(CLI::PositiveNumber);
  bayes->add_option("--sd1", ba.g.sd1)->check(CLI::PositiveNumber);
  bayes->add_option("--lo", ba.lo);
  bayes->add_option("--hi", ba.hi);
  bayes->add_option("--count", ba.count);
  bayes->add_option("--out", ba.out);

  BenchArgs be;
  auto* bench = app.add_subcommand("bench", "train every method and score every fault file");
  add_common(bench, be.common);
  bench->add_option("--train", be.train)->required();
  bench->add_option("--test", be.tests, "test CSV, optionally FAULT_ID=PATH; repeatable")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  bench->add_option("--normal-count", be.normal_count)->check(CLI::PositiveNumber);
  bench->add_option("--methods", be.methods, "comma-separated subset of pca,kpca,ae,sae,sca");
  auto* bp = bench->add_option("--p", be.p)->check(CLI::PositiveNumber);
  bench->add_option("--energy", be.energy)->excludes(bp);
  bench->add_option("--out", be.out, "output directory");
  bench->add_option("--train-samples", be.train_samples, "layout of the training file")
      ->check(CLI::IsMember({"rows", "cols"}));
  bench->add_flag("--svg", be.svg, "also write SVG monitoring charts");
  bench->add_option("--max-iters", be.max_iters);
  bench->add_option("--epochs", be.epochs);
  bench->add_option("--encoder", be.encoder)->check(CLI::IsMember({"tanh", "sigmoid", "identity"}));
  bench->add_option("--decoder", be.decoder)->check(CLI::IsMember({"tanh", "sigmoid", "identity"}));

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  std::vector<const char*> cargs;
  for (const auto& s : args) cargs.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), const_cast<char**>(cargs.data()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train) return run_train(ta);
    if (*detect) return run_detect(da);
    if (*toy) return run_gen_toy(ya);
    if (*bayes) return run_bayes(ba);
    if (*bench) return run_bench_cmd(be);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
