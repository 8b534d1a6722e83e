#include "doctest.h"
#include "helpers.hpp"
#include "sca/baselines.hpp"
#include "sca/persist.hpp"
#include "sca/sca_model.hpp"
#include "sca/toy.hpp"

#include <filesystem>
#include <sstream>

using namespace sca;

namespace {

void check_same_scores(const Detector& a, const Detector& b, const DataMatrix& x) {
  CHECK(a.method() == b.method());
  CHECK(a.variables() == b.variables());
  CHECK(a.monitor().tau == b.monitor().tau);
  CHECK(a.monitor().bandwidth == b.monitor().bandwidth);
  CHECK(a.monitor().sigma_g_inv == b.monitor().sigma_g_inv);
  CHECK(a.monitor().t2_train == b.monitor().t2_train);
  CHECK(a.monitor().feature_mean == b.monitor().feature_mean);
  CHECK(monitor_with(a, x).t2 == monitor_with(b, x).t2);
}

std::unique_ptr<Detector> round_trip(const Detector& model) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("sca_persist_" + std::string(model.method()) + ".model");
  save_model(path, model);
  auto back = load_model(path);
  std::filesystem::remove(path);
  return back;
}

}  // namespace

TEST_SUITE("persist") {
  TEST_CASE("envelope round trip is exact") {
    ModelEnvelope env("demo");
    env.set("zeta", 0.1 + 0.2);
    env.set("count", 42LL);
    env.set("label", std::string("tanh"));
    std::mt19937_64 rng(1);
    const Matrix m = testing::gaussian(3, 4, rng) * 1e-7;
    env.set_matrix("m", m);
    std::stringstream ss;
    env.write(ss);
    const ModelEnvelope back = ModelEnvelope::read(ss);
    CHECK(back.method() == "demo");
    CHECK(back.get_double("zeta") == 0.1 + 0.2);
    CHECK(back.get_int("count") == 42);
    CHECK(back.get_string("label") == "tanh");
    CHECK(back.matrix("m") == m);
    CHECK_THROWS_AS(back.get_double("missing"), FormatError);
  }

  TEST_CASE("malformed envelopes are rejected") {
    std::stringstream bad("not-a-model\n");
    CHECK_THROWS_AS(ModelEnvelope::read(bad), FormatError);
    std::stringstream future("sca-model 99\nmethod sca\nend\n");
    CHECK_THROWS_AS(ModelEnvelope::read(future), FormatError);
    std::stringstream truncated("sca-model 1\nmethod pca\nmatrix a 2 2\n1 2\n");
    CHECK_THROWS_AS(ModelEnvelope::read(truncated), FormatError);
  }

  TEST_CASE("every method survives save and load") {
    ToyConfig tc;
    tc.seed = 5;
    tc.train_m = 120;
    const ToyData toy = generate_toy(tc);
    CgConfig cg;
    cg.max_iters = 40;
    AeConfig ae;
    ae.epochs = 30;
    const ScaModel s = train(toy.train, 2, cg);
    const PcaModel p = pca_fit(toy.train, Index{2});
    const KpcaModel k = kpca_fit(toy.train, 2);
    const AeModel a = ae_train(toy.train, 2, ae);
    const AeModel sa = sae_train(toy.train, 2, ae);
    for (const Detector* d : std::initializer_list<const Detector*>{&s, &p, &k, &a, &sa}) {
      CAPTURE(d->method());
      const auto back = round_trip(*d);
      check_same_scores(*d, *back, toy.test);
    }
    const auto sb = round_trip(s);
    const auto& loaded = dynamic_cast<const ScaModel&>(*sb);
    CHECK(loaded.w() == s.w());
    CHECK(loaded.w_tilde().matrix() == s.w_tilde().matrix());
    CHECK(loaded.activations().encoder == s.activations().encoder);
  }
}
