#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace sca {

enum class Activation { Identity, Tanh, Sigmoid };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

/// Element-wise activation.
Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z);

/// Derivative expressed through the pre-activation z and the output y = activate(a, z).
Eigen::MatrixXd activate_derivative(Activation a, const Eigen::MatrixXd& z,
                                    const Eigen::MatrixXd& y);

/// Encoder (sigma) and decoder (sigma-tilde) slots.
struct Activations {
  Activation encoder = Activation::Tanh;
  Activation decoder = Activation::Identity;
};

}  // namespace sca
