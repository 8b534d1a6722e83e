#include "sca/activation.hpp"

#include <stdexcept>
#include <string>

namespace sca {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity" || name == "linear") return Activation::Identity;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::Identity: return z;
    case Activation::Tanh: return z.array().tanh().matrix();
    case Activation::Sigmoid: return (1.0 / (1.0 + (-z.array()).exp())).matrix();
  }
  return z;
}

Eigen::MatrixXd activate_derivative(Activation a, const Eigen::MatrixXd& z,
                                    const Eigen::MatrixXd& y) {
  switch (a) {
    case Activation::Identity: return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    case Activation::Tanh: return (1.0 - y.array().square()).matrix();
    case Activation::Sigmoid: return (y.array() * (1.0 - y.array())).matrix();
  }
  return Eigen::MatrixXd::Ones(z.rows(), z.cols());
}

}  // namespace sca
