#pragma once

/**
 * @file qsim.hpp
 * Dense statevector simulator for few-qubit circuits.
 *
 * Qubit ordering is little-endian: qubit q is bit q of the basis-state
 * index, so |q2 q1 q0> has index q0 + 2 q1 + 4 q2.
 */

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lipsqml {

using Complex = std::complex<double>;

/// Memory guard for dense simulation.
inline constexpr std::size_t kMaxQubits = 20;

enum class Pauli : std::uint8_t { X, Y, Z };

char pauli_to_char(Pauli p);
Pauli pauli_from_char(char c);

struct PauliFactor {
    std::size_t qubit = 0;
    Pauli op = Pauli::Z;

    friend bool operator==(const PauliFactor &, const PauliFactor &) = default;
};

/**
 * @brief Weighted Pauli string c * P_{q_1} ... P_{q_k}.
 *
 * Qubits not listed act as identity. The bit masks used by the gate kernels
 * are computed once on construction.
 */
class PauliWord {
  public:
    /// Identity word with unit coefficient.
    PauliWord() = default;
    explicit PauliWord(std::vector<PauliFactor> factors, double coefficient = 1.0);

    static PauliWord single(Pauli op, std::size_t qubit, double coefficient = 1.0);
    /// Character i of `ops` (one of I, X, Y, Z) acts on qubit i.
    static PauliWord from_string(std::string_view ops, double coefficient = 1.0);

    [[nodiscard]] const std::vector<PauliFactor> &factors() const { return factors_; }
    [[nodiscard]] double coefficient() const { return coefficient_; }
    [[nodiscard]] PauliWord with_coefficient(double coefficient) const;
    [[nodiscard]] bool is_identity() const { return factors_.empty(); }

    /// Smallest register this word fits on (0 for the identity word).
    [[nodiscard]] std::size_t min_qubits() const;
    /// Inverse of from_string, padded with I up to `n_qubits` characters.
    [[nodiscard]] std::string to_string(std::size_t n_qubits) const;

    /// Bits flipped by the word (X or Y factors).
    [[nodiscard]] std::uint64_t x_mask() const { return x_mask_; }
    /// Bits that contribute a sign (Z or Y factors).
    [[nodiscard]] std::uint64_t z_mask() const { return z_mask_; }
    [[nodiscard]] unsigned y_count() const { return y_count_; }

    friend bool operator==(const PauliWord &a, const PauliWord &b) {
        return a.factors_ == b.factors_ && a.coefficient_ == b.coefficient_;
    }

  private:
    std::vector<PauliFactor> factors_; // sorted by qubit, unique
    double coefficient_ = 1.0;
    std::uint64_t x_mask_ = 0;
    std::uint64_t z_mask_ = 0;
    unsigned y_count_ = 0;
};

/// Hermitian observable sum_i c_i P_i with real coefficients.
struct Observable {
    std::vector<PauliWord> terms;

    /// Sum of |c_i|; an upper bound on the spectral norm.
    [[nodiscard]] double coefficient_l1() const;
    [[nodiscard]] std::size_t min_qubits() const;

    static Observable z_string(std::size_t n_qubits);
};

class StateVector {
  public:
    /// |0...0> on `n_qubits` qubits.
    explicit StateVector(std::size_t n_qubits);

    /// Wraps raw amplitudes; only the length is checked, not the norm.
    static StateVector from_amplitudes(std::size_t n_qubits, std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t size() const { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const { return amplitudes_; }
    [[nodiscard]] std::span<Complex> amplitudes() { return amplitudes_; }
    [[nodiscard]] Complex operator[](std::size_t index) const { return amplitudes_[index]; }
    [[nodiscard]] double norm() const;

  private:
    std::size_t n_qubits_;
    std::vector<Complex> amplitudes_;
};

StateVector init_zero_state(std::size_t n_qubits);

/**
 * @brief Applies exp(-i * angle * c * P) in place, where c * P is `word`.
 *
 * Uses exp(-i phi P) = cos(phi) I - i sin(phi) P on amplitude pairs
 * (b, b ^ x_mask), so the cost is O(2^n) for any word.
 */
void apply_pauli_rotation(StateVector &state, const PauliWord &word, double angle);

void apply_cnot(StateVector &state, std::size_t control, std::size_t target);

/// state <- c * P * state. Not unitary unless |c| = 1.
void apply_pauli(StateVector &state, const PauliWord &word);

/// Returns M |psi> (unnormalized).
StateVector apply_observable(const StateVector &state, const Observable &obs);

/// <bra|ket>
Complex inner_product(const StateVector &bra, const StateVector &ket);

/// <bra| c P |ket> without materializing P|ket>.
Complex matrix_element(const StateVector &bra, const PauliWord &word, const StateVector &ket);

/**
 * @brief <psi|M|psi> for a normalized state.
 *
 * Throws std::domain_error if | ||psi|| - 1 | > 1e-8.
 */
double expectation(const StateVector &state, const Observable &obs);

/// Throws std::out_of_range if `word` touches a qubit the state does not have.
void check_word_fits(const PauliWord &word, std::size_t n_qubits);

} // namespace lipsqml
