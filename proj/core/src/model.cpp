#include "lipsqml/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lipsqml {

namespace {

void check_dims(std::size_t expected, std::size_t actual, const char *what) {
    if (expected != actual) {
        throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                    std::to_string(expected) + ", got " +
                                    std::to_string(actual));
    }
}

// Generator for the i-th data coordinate of the fixed encoding.
Pauli data_axis(std::size_t i) { return (i % 2 == 0) ? Pauli::Z : Pauli::Y; }

constexpr Pauli kParamAxes[3] = {Pauli::Z, Pauli::Y, Pauli::Z};

void add_cnot_ring(Circuit &circuit) {
    const std::size_t n = circuit.n_qubits();
    for (std::size_t q = 0; q < n; ++q) {
        circuit.add_cnot(q, (q + 1) % n);
    }
}

} // namespace

Circuit::Circuit(std::size_t n_qubits, std::size_t data_dim)
    : n_qubits_(n_qubits), data_dim_(data_dim) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("Circuit: n_qubits out of range");
    }
    if (data_dim < 1) {
        throw std::invalid_argument("Circuit: data_dim must be positive");
    }
}

void Circuit::add_rotation(TrainableRotation rotation) {
    if (rotation.generator.coefficient() != 1.0) {
        throw std::invalid_argument("rotation generator must have unit coefficient; "
                                    "put the magnitude into `scale`");
    }
    if (rotation.generator.is_identity()) {
        throw std::invalid_argument("rotation generator must not be the identity");
    }
    check_word_fits(rotation.generator, n_qubits_);
    if (!std::isfinite(rotation.scale)) {
        throw std::invalid_argument("rotation scale must be finite");
    }
    if (rotation.w.empty()) {
        rotation.w.assign(data_dim_, 0.0);
    }
    check_dims(data_dim_, rotation.w.size(), "rotation weights");
    rotation_ops_.push_back(ops_.size());
    ops_.emplace_back(std::move(rotation));
}

void Circuit::add_cnot(std::size_t control, std::size_t target) {
    if (control >= n_qubits_ || target >= n_qubits_) {
        throw std::out_of_range("CNOT qubit index out of range");
    }
    if (control == target) {
        throw std::invalid_argument("CNOT control and target must differ");
    }
    ops_.emplace_back(FixedGate{control, target});
}

const TrainableRotation &Circuit::rotation(std::size_t j) const {
    return std::get<TrainableRotation>(ops_.at(rotation_ops_.at(j)));
}

bool Circuit::has_trainable_encoding() const {
    for (std::size_t j = 0; j < rotation_count(); ++j) {
        if (rotation(j).w_trainable) {
            return true;
        }
    }
    return false;
}

ModelParams Circuit::default_params() const {
    const auto n = static_cast<Eigen::Index>(rotation_count());
    const auto d = static_cast<Eigen::Index>(data_dim_);
    ModelParams params{Eigen::MatrixXd::Zero(n, d), Eigen::VectorXd::Zero(n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto &r = rotation(static_cast<std::size_t>(j));
        for (Eigen::Index k = 0; k < d; ++k) {
            params.W(j, k) = r.w[static_cast<std::size_t>(k)];
        }
        params.omega(j) = r.theta;
    }
    return params;
}

void Circuit::check_params(const ModelParams &params) const {
    check_dims(rotation_count(), static_cast<std::size_t>(params.W.rows()), "params W rows");
    check_dims(data_dim_, static_cast<std::size_t>(params.W.cols()), "params W cols");
    check_dims(rotation_count(), static_cast<std::size_t>(params.omega.size()), "params omega");
}

double encode_angle(std::span<const double> w, double theta, std::span<const double> x) {
    check_dims(w.size(), x.size(), "encode_angle");
    double dot = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        dot += w[k] * x[k];
    }
    return dot + theta;
}

std::vector<double> encode_angles(const Circuit &circuit, const ModelParams &params,
                                  std::span<const double> x) {
    circuit.check_params(params);
    check_dims(circuit.data_dim(), x.size(), "input x");
    const std::size_t n = circuit.rotation_count();
    const std::size_t d = circuit.data_dim();
    std::vector<double> angles(n);
    std::vector<double> row(d);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
            row[k] = params.W(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
        }
        angles[j] = encode_angle(row, params.omega(static_cast<Eigen::Index>(j)), x);
    }
    return angles;
}

StateVector prepare_state(const Circuit &circuit, std::span<const double> angles) {
    check_dims(circuit.rotation_count(), angles.size(), "rotation angles");
    StateVector state(circuit.n_qubits());
    std::size_t j = 0;
    for (const auto &op : circuit.ops()) {
        if (const auto *rot = std::get_if<TrainableRotation>(&op)) {
            apply_pauli_rotation(state, rot->generator, angles[j++] * rot->scale);
        } else {
            const auto &g = std::get<FixedGate>(op);
            apply_cnot(state, g.control, g.target);
        }
    }
    return state;
}

double forward_angles(const Circuit &circuit, std::span<const double> angles,
                      const Observable &obs) {
    return expectation(prepare_state(circuit, angles), obs);
}

double forward(const Circuit &circuit, const ModelParams &params, std::span<const double> x,
               const Observable &obs) {
    const auto angles = encode_angles(circuit, params, x);
    return forward_angles(circuit, angles, obs);
}

int predict(const Circuit &circuit, const ModelParams &params, std::span<const double> x,
            const Observable &obs) {
    return label_from_output(forward(circuit, params, x, obs));
}

Circuit build_paper_circuit(std::size_t n_qubits, std::size_t layers, std::size_t data_dim) {
    if (n_qubits < 2) {
        throw std::invalid_argument("build_paper_circuit: need at least 2 qubits");
    }
    if (layers < 1) {
        throw std::invalid_argument("build_paper_circuit: need at least 1 layer");
    }
    Circuit circuit(n_qubits, data_dim);
    for (std::size_t layer = 0; layer < layers; ++layer) {
        for (std::size_t q = 0; q < n_qubits; ++q) {
            for (Pauli axis : {Pauli::Z, Pauli::Y}) {
                TrainableRotation r;
                r.generator = PauliWord::single(axis, q);
                circuit.add_rotation(std::move(r));
            }
        }
        add_cnot_ring(circuit);
    }
    return circuit;
}

std::size_t fixed_angle_count(const FixedEncodingSpec &spec) {
    return spec.layers * spec.n_qubits * 3;
}

Circuit build_fixed_circuit(const FixedEncodingSpec &spec) {
    if (spec.n_qubits < 2 || spec.layers < 1 || spec.data_dim < 1) {
        throw std::invalid_argument("build_fixed_circuit: invalid spec dimensions");
    }
    Circuit circuit(spec.n_qubits, spec.data_dim);
    for (std::size_t layer = 0; layer < spec.layers; ++layer) {
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            for (std::size_t i = 0; i < spec.data_dim; ++i) {
                TrainableRotation r;
                r.generator = PauliWord::single(data_axis(i), q);
                r.w.assign(spec.data_dim, 0.0);
                r.w[i] = 1.0;
                r.w_trainable = false;
                r.theta_trainable = false;
                circuit.add_rotation(std::move(r));
            }
        }
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            for (Pauli axis : kParamAxes) {
                TrainableRotation r;
                r.generator = PauliWord::single(axis, q);
                r.w_trainable = false;
                circuit.add_rotation(std::move(r));
            }
        }
        add_cnot_ring(circuit);
    }
    return circuit;
}

ModelParams fixed_params(const FixedEncodingSpec &spec, std::span<const double> phi) {
    check_dims(fixed_angle_count(spec), phi.size(), "fixed-encoding angles");
    const Circuit circuit = build_fixed_circuit(spec);
    ModelParams params = circuit.default_params();
    const std::size_t per_layer = spec.n_qubits * (spec.data_dim + 3);
    std::size_t next = 0;
    for (std::size_t layer = 0; layer < spec.layers; ++layer) {
        const std::size_t first = layer * per_layer + spec.n_qubits * spec.data_dim;
        for (std::size_t k = 0; k < spec.n_qubits * 3; ++k) {
            params.omega(static_cast<Eigen::Index>(first + k)) = phi[next++];
        }
    }
    return params;
}

std::vector<double> fixed_angles(const FixedEncodingSpec &spec, const ModelParams &params) {
    const std::size_t per_layer = spec.n_qubits * (spec.data_dim + 3);
    check_dims(spec.layers * per_layer, params.rotation_count(), "fixed-encoding params");
    std::vector<double> phi;
    phi.reserve(fixed_angle_count(spec));
    for (std::size_t layer = 0; layer < spec.layers; ++layer) {
        const std::size_t first = layer * per_layer + spec.n_qubits * spec.data_dim;
        for (std::size_t k = 0; k < spec.n_qubits * 3; ++k) {
            phi.push_back(params.omega(static_cast<Eigen::Index>(first + k)));
        }
    }
    return phi;
}

double forward_fixed_direct(const FixedEncodingSpec &spec, std::span<const double> phi,
                            std::span<const double> x, const Observable &obs) {
    check_dims(fixed_angle_count(spec), phi.size(), "fixed-encoding angles");
    check_dims(spec.data_dim, x.size(), "input x");
    StateVector state(spec.n_qubits);
    std::size_t next = 0;
    for (std::size_t layer = 0; layer < spec.layers; ++layer) {
        // V(x) = prod_i exp(-i x_i G_i) with G_i = Z/2 or Y/2 on every qubit
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            for (std::size_t i = 0; i < spec.data_dim; ++i) {
                apply_pauli_rotation(state, PauliWord::single(data_axis(i), q, 0.5), x[i]);
            }
        }
        // W(phi_l) = prod_p exp(-i phi_{l,p} S_p)
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            for (Pauli axis : kParamAxes) {
                apply_pauli_rotation(state, PauliWord::single(axis, q, 0.5), phi[next++]);
            }
        }
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            apply_cnot(state, q, (q + 1) % spec.n_qubits);
        }
    }
    return expectation(state, obs);
}

} // namespace lipsqml
