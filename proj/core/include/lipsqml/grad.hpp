#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "lipsqml/model.hpp"

namespace lipsqml {

/// Gradient of the model output w.r.t. (W, omega). Frozen entries are exactly 0.
struct Gradient {
    Eigen::MatrixXd dW;
    Eigen::VectorXd domega;
};

struct ValueAndAngleGradients {
    double value = 0.0;
    std::vector<double> angle_grads;
};

/**
 * @brief Adjoint-mode derivatives df/dphi_j for explicit rotation angles.
 *
 * One forward sweep builds |psi> = U|0>, then |lambda> = M|psi>, and a
 * backward sweep un-applies each gate to both states. At rotation j,
 * df/dphi_j = 2 Re <lambda| (-i s_j P_j) |psi>, both states taken right after
 * the gate. Cost O(N 2^n).
 */
ValueAndAngleGradients adjoint_value_and_gradients(const Circuit &circuit,
                                                   std::span<const double> angles,
                                                   const Observable &obs);

std::vector<double> angle_gradients_adjoint(const Circuit &circuit, const ModelParams &params,
                                            std::span<const double> x, const Observable &obs);

/// Chain rule through w_j^T x + theta_j, with the circuit's trainable mask applied.
Gradient assemble_gradient(const Circuit &circuit, std::span<const double> angle_grads,
                           std::span<const double> x);

Gradient full_gradient(const Circuit &circuit, const ModelParams &params,
                       std::span<const double> x, const Observable &obs);

/**
 * @brief Two-term shift rule [f(phi + pi/2) - f(phi - pi/2)] / 2.
 *
 * Only valid for generators with eigenvalues +-1/2, so every rotation must
 * have scale 1/2; anything else throws std::invalid_argument.
 */
std::vector<double> angle_gradients_parameter_shift(const Circuit &circuit,
                                                    const ModelParams &params,
                                                    std::span<const double> x,
                                                    const Observable &obs);

} // namespace lipsqml
