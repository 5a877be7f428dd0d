#pragma once

/**
 * @file model.hpp
 * Quantum models with affine data encodings.
 *
 * A circuit is an ordered list of rotations exp(-i (w_j^T x + theta_j) s_j P_j)
 * and fixed CNOT gates. The model output is <0|U(x)^dag M U(x)|0>. The
 * encoding values (w_j, theta_j) live in ModelParams; the circuit carries the
 * structure, the default/frozen values, and which entries are trainable.
 */

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "lipsqml/qsim.hpp"

namespace lipsqml {

/// Rotation whose angle is an affine function of the input.
struct TrainableRotation {
    PauliWord generator;      ///< unit-coefficient Pauli word P
    double scale = 0.5;       ///< H = scale * P; 1/2 gives the standard R_P gate
    std::vector<double> w;    ///< default (or frozen) encoding weights
    double theta = 0.0;       ///< default (or frozen) offset
    bool w_trainable = true;
    bool theta_trainable = true;
};

/// CNOT, the only non-parametrized gate the models use.
struct FixedGate {
    std::size_t control = 0;
    std::size_t target = 1;
};

using CircuitOp = std::variant<TrainableRotation, FixedGate>;

/// Encoding values for all N rotations. Row j of W is w_j^T, omega(j) is theta_j.
struct ModelParams {
    Eigen::MatrixXd W;
    Eigen::VectorXd omega;

    [[nodiscard]] std::size_t rotation_count() const { return static_cast<std::size_t>(omega.size()); }
    [[nodiscard]] std::size_t data_dim() const { return static_cast<std::size_t>(W.cols()); }
};

class Circuit {
  public:
    Circuit(std::size_t n_qubits, std::size_t data_dim);

    /// Appends a rotation. An empty `w` is filled with zeros.
    void add_rotation(TrainableRotation rotation);
    void add_cnot(std::size_t control, std::size_t target);

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t data_dim() const { return data_dim_; }
    [[nodiscard]] const std::vector<CircuitOp> &ops() const { return ops_; }
    [[nodiscard]] std::size_t rotation_count() const { return rotation_ops_.size(); }
    [[nodiscard]] std::size_t cnot_count() const { return ops_.size() - rotation_ops_.size(); }
    /// j-th rotation in circuit order.
    [[nodiscard]] const TrainableRotation &rotation(std::size_t j) const;

    /// True if any rotation has trainable encoding weights.
    [[nodiscard]] bool has_trainable_encoding() const;

    /// Params holding each rotation's default/frozen w and theta.
    [[nodiscard]] ModelParams default_params() const;
    /// Throws std::invalid_argument on shape mismatch.
    void check_params(const ModelParams &params) const;

  private:
    std::size_t n_qubits_;
    std::size_t data_dim_;
    std::vector<CircuitOp> ops_;
    std::vector<std::size_t> rotation_ops_;
};

/// w^T x + theta.
double encode_angle(std::span<const double> w, double theta, std::span<const double> x);

/// All N rotation angles for input x.
std::vector<double> encode_angles(const Circuit &circuit, const ModelParams &params,
                                  std::span<const double> x);

/// U|0> for explicit rotation angles (length N).
StateVector prepare_state(const Circuit &circuit, std::span<const double> angles);

/// Model output as a function of the rotation angles only.
double forward_angles(const Circuit &circuit, std::span<const double> angles,
                      const Observable &obs);

double forward(const Circuit &circuit, const ModelParams &params, std::span<const double> x,
               const Observable &obs);

/// sign(f) with sign(0) = +1.
inline int label_from_output(double f) { return f >= 0.0 ? 1 : -1; }

int predict(const Circuit &circuit, const ModelParams &params, std::span<const double> x,
            const Observable &obs);

/**
 * @brief Trainable-encoding ansatz used in the circle experiments.
 *
 * Per layer and qubit: R_Z(alpha) then R_Y(beta), both with affine angles;
 * then a CNOT ring q -> (q + 1) mod n. The third Euler angle of the general
 * SU(2) rotation is fixed to zero and therefore left out.
 */
Circuit build_paper_circuit(std::size_t n_qubits = 3, std::size_t layers = 3,
                            std::size_t data_dim = 2);

/// Fixed-encoding (alternating data / parameter block) model layout.
struct FixedEncodingSpec {
    std::size_t n_qubits = 3;
    std::size_t layers = 3;
    std::size_t data_dim = 2;
};

/// Number of free angles: 3 per qubit per layer.
std::size_t fixed_angle_count(const FixedEncodingSpec &spec);

/**
 * @brief Fixed-encoding circuit in the general Circuit representation.
 *
 * Per layer: data block with x_i encoded on every qubit through R_Z (even i)
 * or R_Y (odd i) with frozen unit weights and zero offsets; a parameter block
 * R_Z R_Y R_Z per qubit with frozen zero weights and trainable offsets; the
 * CNOT ring.
 */
Circuit build_fixed_circuit(const FixedEncodingSpec &spec);

/// Params for build_fixed_circuit(spec) with the given angles, ordered (layer, qubit, axis).
ModelParams fixed_params(const FixedEncodingSpec &spec, std::span<const double> phi);

/// The trainable angles of a fixed-encoding param set, inverse of fixed_params.
std::vector<double> fixed_angles(const FixedEncodingSpec &spec, const ModelParams &params);

/// Evaluates the fixed-encoding model directly from the layer definition,
/// without going through the affine Circuit representation.
double forward_fixed_direct(const FixedEncodingSpec &spec, std::span<const double> phi,
                            std::span<const double> x, const Observable &obs);

} // namespace lipsqml
