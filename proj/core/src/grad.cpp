#include "lipsqml/grad.hpp"

#include <numbers>
#include <stdexcept>

namespace lipsqml {

ValueAndAngleGradients adjoint_value_and_gradients(const Circuit &circuit,
                                                   std::span<const double> angles,
                                                   const Observable &obs) {
    StateVector psi = prepare_state(circuit, angles);
    StateVector lambda = apply_observable(psi, obs);

    ValueAndAngleGradients out;
    out.value = inner_product(psi, lambda).real();
    out.angle_grads.assign(circuit.rotation_count(), 0.0);

    const auto &ops = circuit.ops();
    std::size_t j = circuit.rotation_count();
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        if (const auto *rot = std::get_if<TrainableRotation>(&*it)) {
            --j;
            // <lambda| (-i s P) |psi> = -i s <lambda|P|psi>
            const Complex overlap = matrix_element(lambda, rot->generator, psi);
            out.angle_grads[j] = 2.0 * rot->scale * overlap.imag();

            const double undo = -angles[j] * rot->scale;
            apply_pauli_rotation(psi, rot->generator, undo);
            apply_pauli_rotation(lambda, rot->generator, undo);
        } else {
            const auto &g = std::get<FixedGate>(*it);
            apply_cnot(psi, g.control, g.target);
            apply_cnot(lambda, g.control, g.target);
        }
    }
    return out;
}

std::vector<double> angle_gradients_adjoint(const Circuit &circuit, const ModelParams &params,
                                            std::span<const double> x, const Observable &obs) {
    const auto angles = encode_angles(circuit, params, x);
    return adjoint_value_and_gradients(circuit, angles, obs).angle_grads;
}

Gradient assemble_gradient(const Circuit &circuit, std::span<const double> angle_grads,
                           std::span<const double> x) {
    const std::size_t n = circuit.rotation_count();
    const std::size_t d = circuit.data_dim();
    if (angle_grads.size() != n || x.size() != d) {
        throw std::invalid_argument("assemble_gradient: dimension mismatch");
    }
    Gradient g{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)),
               Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
    for (std::size_t j = 0; j < n; ++j) {
        const auto &rot = circuit.rotation(j);
        const auto row = static_cast<Eigen::Index>(j);
        if (rot.w_trainable) {
            for (std::size_t k = 0; k < d; ++k) {
                g.dW(row, static_cast<Eigen::Index>(k)) = angle_grads[j] * x[k];
            }
        }
        if (rot.theta_trainable) {
            g.domega(row) = angle_grads[j];
        }
    }
    return g;
}

Gradient full_gradient(const Circuit &circuit, const ModelParams &params,
                       std::span<const double> x, const Observable &obs) {
    return assemble_gradient(circuit, angle_gradients_adjoint(circuit, params, x, obs), x);
}

std::vector<double> angle_gradients_parameter_shift(const Circuit &circuit,
                                                    const ModelParams &params,
                                                    std::span<const double> x,
                                                    const Observable &obs) {
    for (std::size_t j = 0; j < circuit.rotation_count(); ++j) {
        if (circuit.rotation(j).scale != 0.5) {
            throw std::invalid_argument("parameter shift requires scale 1/2 on every rotation");
        }
    }
    constexpr double shift = std::numbers::pi / 2.0;
    auto angles = encode_angles(circuit, params, x);
    std::vector<double> grads(angles.size());
    for (std::size_t j = 0; j < angles.size(); ++j) {
        const double base = angles[j];
        angles[j] = base + shift;
        const double plus = forward_angles(circuit, angles, obs);
        angles[j] = base - shift;
        const double minus = forward_angles(circuit, angles, obs);
        angles[j] = base;
        grads[j] = 0.5 * (plus - minus);
    }
    return grads;
}

} // namespace lipsqml
