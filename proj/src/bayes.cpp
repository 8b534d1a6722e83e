#include "sca/bayes.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sca {

LogOddsCoefficients log_odds_coefficients(const GaussianPair& g) {
  if (!(g.sd0 > 0.0) || !(g.sd1 > 0.0)) {
    throw std::invalid_argument("bayes: standard deviations must be positive");
  }
  const double v0 = g.sd0 * g.sd0;
  const double v1 = g.sd1 * g.sd1;
  return {0.5 / v0 - 0.5 / v1, g.mu0 / v0 - g.mu1 / v1,
          0.5 * g.mu0 * g.mu0 / v0 - 0.5 * g.mu1 * g.mu1 / v1};
}

double posterior_class0(const GaussianPair& g, double x) {
  const LogOddsCoefficients k = log_odds_coefficients(g);
  const double exponent = std::log(g.sd0 / g.sd1) + k.a * x * x - k.b * x + k.c;
  return 1.0 / (1.0 + std::exp(exponent));
}

std::vector<BayesPoint> bayes_curve(const GaussianPair& g, double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw std::invalid_argument("bayes: need hi > lo and count >= 2");
  std::vector<BayesPoint> out;
  out.reserve(count);
  const double dx = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    const double x = lo + i * dx;
    out.push_back({x, posterior_class0(g, x)});
  }
  return out;
}

void write_bayes_csv(const std::filesystem::path& path, const std::vector<BayesPoint>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "x,posterior\n";
  for (const auto& p : curve) out << p.x << ',' << p.posterior << '\n';
}

}  // namespace sca
