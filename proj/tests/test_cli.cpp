#include "doctest.h"
#include "helpers.hpp"
#include "sca/bayes.hpp"
#include "sca/bench.hpp"
#include "sca/csv.hpp"
#include "sca/toy.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sca;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sca_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string("\"") + SCA_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BenchSpec toy_bench(const fs::path& dir, std::uint64_t seed) {
  ToyConfig tc;
  tc.seed = seed;
  const ToyData toy = generate_toy(tc);
  save_csv(dir / "train.csv", toy.train);
  save_csv(dir / "test.csv", toy.test);
  BenchSpec spec;
  spec.train_path = dir / "train.csv";
  spec.cases = {{"1", dir / "test.csv", 100}};
  spec.methods = {"pca", "sca"};
  spec.p = 2;
  spec.seed = seed;
  spec.out_dir = dir / "out";
  return spec;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("toy process equations") {
    const Eigen::Vector3d zero = toy_process(0, 0, Eigen::Vector3d::Zero());
    CHECK(zero == Eigen::Vector3d::Zero());
    const Eigen::Vector3d one = toy_process(1, 0, Eigen::Vector3d::Zero());
    CHECK(one == Eigen::Vector3d(1, 7, 3));
    CHECK((one + Eigen::Vector3d::Constant(1.0)) == Eigen::Vector3d(2, 8, 4));
    const Eigen::Vector3d full = toy_process(0.5, -1.0, Eigen::Vector3d(0.1, 0.2, 0.3));
    CHECK(full(0) == doctest::Approx(0.6));
    CHECK(full(1) == doctest::Approx(0.125 - 4.5 + 3.0 - 1.0 + 0.2));
    CHECK(full(2) == doctest::Approx(3 * 0.0625 + 1.0 + 3.0 + 0.3));
  }

  TEST_CASE("generated toy data shapes, fault shift and noise reading") {
    ToyConfig tc;
    tc.seed = 4;
    const ToyData a = generate_toy(tc);
    CHECK(a.train.variables() == 3);
    CHECK(a.train.samples() == 500);
    CHECK(a.test.samples() == 500);
    CHECK(generate_toy(tc).test.values() == a.test.values());

    // The same latent draws with zero shift differ only in the fault block.
    ToyConfig no_shift = tc;
    no_shift.fault_shift = 0.0;
    const ToyData b = generate_toy(no_shift);
    const Matrix diff = a.test.values() - b.test.values();
    CHECK(diff.leftCols(100).isZero(0.0));
    CHECK((diff.rightCols(400).array() - 1.0).abs().maxCoeff() <= 1e-9);

    // Variance reading: e1 = x1 - t1 is not observable, but x1 ~ N(0, 1 + var).
    ToyConfig big = tc;
    big.train_m = 20000;
    big.train_noise = 3.0;
    const Matrix x1 = generate_toy(big).train.values().row(0);
    const double var = (x1.array() - x1.mean()).square().sum() / (x1.size() - 1);
    CHECK(std::abs(var - 4.0) <= 0.2);
    big.noise_as_sd = true;
    const Matrix y1 = generate_toy(big).train.values().row(0);
    const double var_sd = (y1.array() - y1.mean()).square().sum() / (y1.size() - 1);
    CHECK(std::abs(var_sd - 10.0) <= 0.5);
  }

  TEST_CASE("bayes posterior") {
    const GaussianPair same{0.3, 0.3, 1.2, 1.2};
    for (double x : {-3.0, 0.0, 2.5}) CHECK(posterior_class0(same, x) == 0.5);

    const GaussianPair eq{-1.0, 2.0, 1.5, 1.5};
    const double v = 1.5 * 1.5;
    const double w = (eq.mu0 - eq.mu1) / v;
    const double b = (eq.mu1 * eq.mu1 - eq.mu0 * eq.mu0) / (2 * v);
    double worst = 0.0;
    for (const auto& pt : bayes_curve(eq, -6, 6, 241))
      worst = std::max(worst, std::abs(pt.posterior - 1.0 / (1.0 + std::exp(-(w * pt.x + b)))));
    CHECK(worst <= 1e-12);

    // log(P / (1 - P)) = -(a x^2 - b x + c') with a = 1/(2 s0^2) - 1/(2 s1^2).
    const GaussianPair het{0.0, 0.5, 0.7, 1.6};
    const double a = log_odds_coefficients(het).a;
    const auto curve = bayes_curve(het, -2, 2, 81);
    const double dx = curve[1].x - curve[0].x;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
      auto logit = [&](std::size_t k) {
        return std::log(curve[k].posterior / (1.0 - curve[k].posterior));
      };
      const double second = logit(i + 1) - 2 * logit(i) + logit(i - 1);
      CHECK(std::abs(second - (-2.0 * a * dx * dx)) <= 1e-8);
    }
    CHECK_THROWS_AS(log_odds_coefficients({0, 0, 0.0, 1}), std::invalid_argument);
  }

  TEST_CASE("bench output shape") {
    const fs::path dir = scratch("shape");
    BenchSpec spec = toy_bench(dir, 3);
    spec.svg = true;
    const BenchResult r = run_bench(spec);
    CHECK(r.p == 2);
    CHECK(r.cells.size() == 2);
    for (const auto& c : r.cells) CHECK(c.rates.has_value());

    std::ifstream metrics(dir / "out" / "metrics.csv");
    std::string line;
    std::getline(metrics, line);
    CHECK(line == "fault_id,method,mdr,far");
    int rows = 0;
    while (std::getline(metrics, line)) rows += !line.empty();
    CHECK(rows == 2);

    std::ifstream table(dir / "out" / "table.csv");
    std::getline(table, line);
    CHECK(line == "fault_id,pca_mdr,pca_far,sca_mdr,sca_far");
    rows = 0;
    while (std::getline(table, line)) rows += !line.empty();
    CHECK(rows == 1);

    for (const char* f : {"charts/sca_fault1.csv", "charts/pca_fault1.csv", "charts/sca_fault1.svg",
                          "trace_sca.csv", "run.json"})
      CHECK(fs::exists(dir / "out" / f));

    // Chart rows satisfy flag = (t2 > tau) exactly.
    const DataMatrix chart = load_csv(dir / "out" / "charts" / "sca_fault1.csv",
                                      {SampleLayout::Rows, true});
    CHECK(chart.samples() == 500);
    for (Index i = 0; i < chart.samples(); ++i) {
      CHECK(chart.values()(4, i) == (chart.values()(1, i) > chart.values()(2, i) ? 1.0 : 0.0));
      CHECK(chart.values()(3, i) == (i < 100 ? 0.0 : 1.0));
    }
  }

  TEST_CASE("bench failures become NA cells") {
    const fs::path dir = scratch("na");
    BenchSpec spec = toy_bench(dir, 3);
    spec.methods = {"pca", "kpca"};
    spec.p = 600;  // above the KPCA sample count and the PCA variable count
    const BenchResult r = run_bench(spec);
    for (const auto& c : r.cells) {
      CHECK_FALSE(c.rates.has_value());
      CHECK_FALSE(c.error.empty());
    }
    CHECK(slurp(dir / "out" / "metrics.csv").find("NA") != std::string::npos);
  }

  TEST_CASE("bench is deterministic") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    BenchSpec sa = toy_bench(a, 9);
    BenchSpec sb = toy_bench(b, 9);
    sa.methods = sb.methods = {"pca", "kpca", "ae", "sae", "sca"};
    sa.ae.epochs = sb.ae.epochs = 100;
    run_bench(sa);
    run_bench(sb);
    CHECK(slurp(a / "out" / "metrics.csv") == slurp(b / "out" / "metrics.csv"));
    CHECK(slurp(a / "out" / "table.csv") == slurp(b / "out" / "table.csv"));
    CHECK(slurp(a / "out" / "charts" / "sca_fault1.csv") ==
          slurp(b / "out" / "charts" / "sca_fault1.csv"));
    CHECK(method_seed(9, "sca") != method_seed(9, "ae"));
  }

  TEST_CASE("command line end to end") {
    const fs::path dir = scratch("e2e");
    const fs::path log = dir / "log.txt";
    REQUIRE(run_cli("gen-toy --seed 2 --out \"" + dir.string() + "\"", log) == 0);
    CHECK(fs::exists(dir / "toy_train.csv"));
    CHECK(fs::exists(dir / "toy_test.csv"));

    const std::string model = (dir / "sca.model").string();
    CHECK(run_cli("train --method sca --p 2 --input \"" + (dir / "toy_train.csv").string() +
                      "\" --out \"" + model + "\" --trace \"" + (dir / "trace.csv").string() + "\"",
                  log) == 0);
    CHECK(fs::exists(model));
    CHECK(fs::exists(dir / "trace.csv"));

    CHECK(run_cli("detect --model \"" + model + "\" --input \"" +
                      (dir / "toy_test.csv").string() + "\" --normal-count 100 --out \"" +
                      (dir / "chart.csv").string() + "\"",
                  log) == 0);
    CHECK(slurp(log).find("# mdr") != std::string::npos);
    CHECK(fs::exists(dir / "chart.csv"));

    // Four variables against a three-variable model.
    std::ofstream(dir / "wide.csv") << "1,2,3,4\n5,6,7,8\n";
    CHECK(run_cli("detect --model \"" + model + "\" --input \"" + (dir / "wide.csv").string() + "\"",
                  log) != 0);
    CHECK(slurp(log).find("expects n = 3") != std::string::npos);

    std::ofstream(dir / "run.cfg") << "method = pca\np = 1\n";
    CHECK(run_cli("train --config \"" + (dir / "run.cfg").string() + "\" --input \"" +
                      (dir / "toy_train.csv").string() + "\" --out \"" +
                      (dir / "pca.model").string() + "\"",
                  log) == 0);
    CHECK(slurp(log).find("method pca") != std::string::npos);

    CHECK(run_cli("bayes-demo --mu0 0 --mu1 1 --sd0 1 --sd1 2 --out \"" +
                      (dir / "bayes.csv").string() + "\"",
                  log) == 0);
    CHECK(slurp(dir / "bayes.csv").rfind("x,posterior\n", 0) == 0);

    CHECK(run_cli("bench --train \"" + (dir / "toy_train.csv").string() + "\" --test 1=\"" +
                      (dir / "toy_test.csv").string() +
                      "\" --normal-count 100 --methods pca,sca --p 2 --out \"" +
                      (dir / "bench").string() + "\"",
                  log) == 0);
    CHECK(fs::exists(dir / "bench" / "metrics.csv"));

    CHECK(run_cli("train --method nope --input \"" + (dir / "toy_train.csv").string() + "\"",
                  log) != 0);
    CHECK(run_cli("bayes-demo --sd0 -1", log) != 0);
  }
}
