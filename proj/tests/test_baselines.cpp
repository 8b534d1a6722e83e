#include "doctest.h"
#include "helpers.hpp"
#include "sca/baselines.hpp"
#include "sca/sca_model.hpp"
#include "sca/toy.hpp"

#include <cmath>

using namespace sca;
using sca::testing::gaussian;

namespace {

const Activations kLinear{Activation::Identity, Activation::Identity};

AeParams random_params(Index in, Index p, std::mt19937_64& rng) {
  return {gaussian(in, p, rng, 0.5), gaussian(p, 1, rng, 0.5), gaussian(in, p, rng, 0.5),
          gaussian(in, 1, rng, 0.5)};
}

double ae_grad_error(const AeParams& prm, const Matrix& x, const Activations& act) {
  const AeParams g = ae_cost_and_grad(prm, x, act).grad;
  const double h = 1e-6;
  double worst = 0.0;
  double scale = 1.0;
  for (const Matrix* m : {&g.w, &g.w_dec}) scale = std::max(scale, m->cwiseAbs().maxCoeff());
  scale = std::max({scale, g.b.cwiseAbs().maxCoeff(), g.b_dec.cwiseAbs().maxCoeff()});
  auto check = [&](auto member, const auto& analytic) {
    for (Index i = 0; i < analytic.rows(); ++i)
      for (Index j = 0; j < analytic.cols(); ++j) {
        AeParams plus = prm, minus = prm;
        (plus.*member)(i, j) += h;
        (minus.*member)(i, j) -= h;
        const double fd = (ae_cost(plus, x, act) - ae_cost(minus, x, act)) / (2 * h);
        worst = std::max(worst, std::abs(fd - analytic(i, j)) / scale);
      }
  };
  check(&AeParams::w, g.w);
  check(&AeParams::b, g.b);
  check(&AeParams::w_dec, g.w_dec);
  check(&AeParams::b_dec, g.b_dec);
  return worst;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("energy rule") {
    Vector ev(2);
    ev << 9.0, 1.0;
    CHECK(dimension_for_energy(ev, 0.85) == 1);
    ev << 4.0, 1.0;
    CHECK(dimension_for_energy(ev, 0.85) == 2);
    CHECK_THROWS_AS(dimension_for_energy(ev, 0.0), std::invalid_argument);
  }

  TEST_CASE("pca on strongly correlated pair keeps one component") {
    // After z-scoring the correlation matrix [[1, r], [r, 1]] has eigenvalues
    // 1 + r and 1 - r; r = 0.8 puts 90% of the energy on (1, 1)/sqrt(2).
    std::mt19937_64 rng(1);
    const Matrix base = gaussian(2, 4000, rng);
    Matrix x(2, 4000);
    x.row(0) = base.row(0);
    x.row(1) = 0.8 * base.row(0) + 0.6 * base.row(1);
    const PcaModel pca = pca_fit(DataMatrix(x), Energy{0.85});
    CHECK(pca.p() == 1);
    CHECK(std::abs(std::abs(pca.loading()(0, 0)) - std::sqrt(0.5)) <= 0.01);
    CHECK(pca.loading()(0, 0) * pca.loading()(1, 0) > 0.0);
  }

  TEST_CASE("pca on isotropic data needs most components") {
    std::mt19937_64 rng(2);
    const PcaModel pca = pca_fit(DataMatrix(gaussian(10, 5000, rng)), Energy{0.85});
    CHECK(std::abs(pca.p() - 9) <= 1);
  }

  TEST_CASE("pca matches a brute-force decomposition") {
    std::mt19937_64 rng(3);
    const Index n = 8, m = 300, p = 3;
    const Matrix mix = gaussian(n, n, rng);
    const DataMatrix d(mix * gaussian(n, m, rng));
    const PcaModel pca = pca_fit(d, p);
    CHECK(orthonormality_residual(pca.loading()) <= 1e-10);
    for (Index k = 1; k < n; ++k) CHECK(pca.eigenvalues()(k) <= pca.eigenvalues()(k - 1));

    const Matrix z = apply_scaler(fit_scaler(d), d.values());
    Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU);
    const Matrix brute = svd.matrixU().leftCols(p);
    CHECK(testing::max_principal_angle(pca.loading(), brute) <= 1e-8);

    const Matrix w = pca.loading();
    const double recon = (z - w * w.transpose() * z).squaredNorm();
    const double discarded = pca.eigenvalues().tail(n - p).sum() * (m - 1);
    CHECK(testing::rel_err(recon, discarded) <= 1e-8);

    CHECK_THROWS_AS(pca_fit(d, Index{0}), std::invalid_argument);
    Matrix rank_one(3, 50);
    rank_one.row(0) = gaussian(1, 50, rng);
    rank_one.row(1) = 2.0 * rank_one.row(0);
    rank_one.row(2) = -rank_one.row(0);
    CHECK_THROWS_AS(pca_fit(DataMatrix(rank_one), Index{2}), NumericalError);
  }

  TEST_CASE("pca features feed the shared monitor") {
    std::mt19937_64 rng(4);
    const DataMatrix d(gaussian(4, 500, rng));
    const PcaModel pca = pca_fit(d, Index{2});
    const DetectionReport via_model = monitor_with(pca, d);
    const DetectionReport direct = detect_features(pca.monitor(), pca.features(d.values()));
    CHECK(via_model.t2 == direct.t2);
    Index alarms = 0;
    for (bool f : via_model.flags) alarms += f;
    CHECK(static_cast<double>(alarms) / 500.0 <= 0.025);
    CHECK_THROWS_AS(monitor_with(pca, DataMatrix(Matrix::Zero(3, 4))), std::invalid_argument);
  }

  TEST_CASE("kpca kernel and centering") {
    Matrix pts(1, 3);
    pts << -1, 0, 1;
    const Matrix k = KpcaModel::kernel(pts, pts, 2.0);
    CHECK(k(0, 0) == 1.0);
    CHECK(k(0, 1) == doctest::Approx(std::exp(-0.5)));
    CHECK(k(0, 2) == doctest::Approx(std::exp(-2.0)));
    CHECK(k(0, 1) == doctest::Approx(0.6065).epsilon(1e-4));
    CHECK(k(0, 2) == doctest::Approx(0.1353).epsilon(1e-3));

    std::mt19937_64 rng(5);
    const Matrix z = gaussian(3, 40, rng);
    const Matrix kc = center_gram(KpcaModel::kernel(z, z, 30.0));
    CHECK(kc.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((kc - kc.transpose()).norm() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(kc);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }

  TEST_CASE("kpca self-consistency") {
    std::mt19937_64 rng(6);
    const DataMatrix d(gaussian(3, 120, rng));
    const KpcaModel model = kpca_fit(d, 4);
    CHECK(model.width() == doctest::Approx(30.0));
    for (Index k = 1; k < 4; ++k) CHECK(model.eigenvalues()(k) <= model.eigenvalues()(k - 1));
    CHECK(model.eigenvalues()(3) > 0.0);

    const Matrix z = apply_scaler(fit_scaler(d), d.values());
    const Matrix g_train =
        (center_gram(KpcaModel::kernel(z, z, model.width())) * model.alpha()).transpose();
    const Matrix g = model.features(d.values());
    CHECK((g - g_train).cwiseAbs().maxCoeff() <= 1e-8);

    // Whitened features: unit sample variance.
    const Matrix gc = g_train.colwise() - g_train.rowwise().mean();
    const Matrix cov = gc * gc.transpose() / 119.0;
    CHECK((cov - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);

    CHECK_THROWS_AS(kpca_fit(DataMatrix(gaussian(2, 3, rng)), 3), std::invalid_argument);
  }

  TEST_CASE("ae gradient matches finite differences") {
    std::mt19937_64 rng(7);
    const Matrix x = gaussian(4, 6, rng);
    for (const Activations act :
         {Activations{}, Activations{Activation::Sigmoid, Activation::Tanh}, kLinear}) {
      CHECK(ae_grad_error(random_params(4, 2, rng), x, act) <= 1e-5);
    }
  }

  TEST_CASE("ae on zero data") {
    const Matrix x = Matrix::Zero(4, 10);
    std::mt19937_64 rng(8);
    AeParams prm = random_params(4, 2, rng);
    prm.b.setZero();
    prm.b_dec.setZero();
    CHECK(ae_cost(prm, x, {}) == 0.0);
    AeConfig cfg;
    cfg.epochs = 20;
    const AeFit fit = ae_optimize(x, 2, cfg);
    CHECK(fit.trace.cost_per_iter.back() == 0.0);
  }

  TEST_CASE("linear ae cannot beat pca") {
    std::mt19937_64 rng(9);
    const Index n = 5, m = 80, p = 2;
    const Matrix x = gaussian(n, n, rng) * gaussian(n, m, rng);
    AeConfig cfg;
    cfg.activations = kLinear;
    cfg.epochs = 3000;
    const AeFit fit = ae_optimize(x, p, cfg);
    const Matrix xc = x.colwise() - x.rowwise().mean();
    Eigen::JacobiSVD<Matrix> svd(xc);
    const double residual = svd.singularValues().tail(n - p).squaredNorm();
    CHECK(fit.trace.cost_per_iter.back() >= residual - 1e-6);
    const auto& c = fit.trace.cost_per_iter;
    for (std::size_t k = 1; k < c.size(); ++k) CHECK(c[k] <= c[k - 1]);
    CHECK(c.back() < c.front());
  }

  TEST_CASE("sae works on the expanded input") {
    std::mt19937_64 rng(10);
    const DataMatrix d(gaussian(3, 60, rng));
    AeConfig cfg;
    cfg.epochs = 50;
    const AeModel sae = sae_train(d, 2, cfg);
    CHECK(sae.method() == "sae");
    CHECK(sae.input_dimension() == 13);
    CHECK(expanded_dimension(52) == 2757);
    CHECK(sae.features(d.values()).rows() == 2);
    const AeModel ae = ae_train(d, 2, cfg);
    CHECK(ae.method() == "ae");
    CHECK(ae.input_dimension() == 3);

    // Zero scaled data expands to the constant row only; a bias-only
    // decoder reproduces it exactly.
    const Matrix ex = expand_second_order(Matrix(Matrix::Zero(3, 7)));
    AeParams prm{Matrix::Zero(13, 2), Vector::Zero(2), Matrix::Zero(13, 2), Vector::Zero(13)};
    CHECK(ae_cost(prm, ex, {}) == 7.0);
    prm.b_dec(0) = 1.0;
    CHECK(ae_cost(prm, ex, {}) == 0.0);
    AeConfig zc;
    zc.epochs = 400;
    const AeFit fit = ae_optimize(ex, 2, zc);
    CHECK(fit.trace.cost_per_iter.back() < 1e-3 * fit.trace.cost_per_iter.front());
  }
}
