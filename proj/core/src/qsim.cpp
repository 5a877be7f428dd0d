#include "lipsqml/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace lipsqml {

namespace {

constexpr double kNormTolerance = 1e-8;
constexpr double kImagTolerance = 1e-10;

// i^k for k mod 4.
Complex i_power(unsigned k) {
    switch (k % 4U) {
    case 0:
        return {1.0, 0.0};
    case 1:
        return {0.0, 1.0};
    case 2:
        return {-1.0, 0.0};
    default:
        return {0.0, -1.0};
    }
}

// P|b> = phase(b) |b ^ x_mask> with phase(b) = i^{#Y} (-1)^{popcount(b & z_mask)}.
inline Complex word_phase(const PauliWord &word, Complex y_phase, std::uint64_t b) {
    return (std::popcount(b & word.z_mask()) & 1U) ? -y_phase : y_phase;
}

void check_qubit(std::size_t qubit, std::size_t n_qubits) {
    if (qubit >= n_qubits) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(n_qubits) +
                                "-qubit state");
    }
}

} // namespace

char pauli_to_char(Pauli p) {
    switch (p) {
    case Pauli::X:
        return 'X';
    case Pauli::Y:
        return 'Y';
    case Pauli::Z:
        return 'Z';
    }
    return '?';
}

Pauli pauli_from_char(char c) {
    switch (c) {
    case 'X':
    case 'x':
        return Pauli::X;
    case 'Y':
    case 'y':
        return Pauli::Y;
    case 'Z':
    case 'z':
        return Pauli::Z;
    default:
        throw std::invalid_argument(std::string("not a Pauli operator: '") + c + "'");
    }
}

PauliWord::PauliWord(std::vector<PauliFactor> factors, double coefficient)
    : factors_(std::move(factors)), coefficient_(coefficient) {
    if (!std::isfinite(coefficient_)) {
        throw std::invalid_argument("PauliWord coefficient must be finite");
    }
    std::sort(factors_.begin(), factors_.end(),
              [](const PauliFactor &a, const PauliFactor &b) { return a.qubit < b.qubit; });
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const auto &f = factors_[i];
        if (i > 0 && factors_[i - 1].qubit == f.qubit) {
            throw std::invalid_argument("PauliWord has two factors on qubit " +
                                        std::to_string(f.qubit));
        }
        if (f.qubit >= 64) {
            throw std::out_of_range("PauliWord qubit index exceeds 63");
        }
        const std::uint64_t bit = std::uint64_t{1} << f.qubit;
        if (f.op != Pauli::Z) {
            x_mask_ |= bit;
        }
        if (f.op != Pauli::X) {
            z_mask_ |= bit;
        }
        if (f.op == Pauli::Y) {
            ++y_count_;
        }
    }
}

PauliWord PauliWord::single(Pauli op, std::size_t qubit, double coefficient) {
    return PauliWord({PauliFactor{qubit, op}}, coefficient);
}

PauliWord PauliWord::from_string(std::string_view ops, double coefficient) {
    std::vector<PauliFactor> factors;
    for (std::size_t q = 0; q < ops.size(); ++q) {
        if (ops[q] == 'I' || ops[q] == 'i') {
            continue;
        }
        factors.push_back({q, pauli_from_char(ops[q])});
    }
    return PauliWord(std::move(factors), coefficient);
}

PauliWord PauliWord::with_coefficient(double coefficient) const {
    return PauliWord(factors_, coefficient);
}

std::size_t PauliWord::min_qubits() const {
    return factors_.empty() ? 0 : factors_.back().qubit + 1;
}

std::string PauliWord::to_string(std::size_t n_qubits) const {
    std::string out(std::max(n_qubits, min_qubits()), 'I');
    for (const auto &f : factors_) {
        out[f.qubit] = pauli_to_char(f.op);
    }
    return out;
}

double Observable::coefficient_l1() const {
    double total = 0.0;
    for (const auto &t : terms) {
        total += std::abs(t.coefficient());
    }
    return total;
}

std::size_t Observable::min_qubits() const {
    std::size_t n = 0;
    for (const auto &t : terms) {
        n = std::max(n, t.min_qubits());
    }
    return n;
}

Observable Observable::z_string(std::size_t n_qubits) {
    return Observable{{PauliWord::from_string(std::string(n_qubits, 'Z'))}};
}

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                                    "], got " + std::to_string(n_qubits));
    }
    amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amplitudes_[0] = Complex{1.0, 0.0};
}

StateVector StateVector::from_amplitudes(std::size_t n_qubits, std::vector<Complex> amplitudes) {
    StateVector state(n_qubits);
    if (amplitudes.size() != state.size()) {
        throw std::invalid_argument("expected " + std::to_string(state.size()) +
                                    " amplitudes, got " + std::to_string(amplitudes.size()));
    }
    state.amplitudes_ = std::move(amplitudes);
    return state;
}

double StateVector::norm() const {
    double sum = 0.0;
    for (const auto &a : amplitudes_) {
        sum += std::norm(a);
    }
    return std::sqrt(sum);
}

StateVector init_zero_state(std::size_t n_qubits) { return StateVector(n_qubits); }

void check_word_fits(const PauliWord &word, std::size_t n_qubits) {
    if (word.min_qubits() > n_qubits) {
        check_qubit(word.min_qubits() - 1, n_qubits);
    }
}

void apply_pauli_rotation(StateVector &state, const PauliWord &word, double angle) {
    check_word_fits(word, state.n_qubits());
    const double phi = angle * word.coefficient();
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const Complex minus_i_sin{0.0, -s};
    auto amps = state.amplitudes();
    const std::uint64_t x = word.x_mask();
    const Complex y_phase = i_power(word.y_count());

    if (x == 0) {
        // Diagonal word: phase is +-1 and y_phase = 1.
        const Complex plus = Complex{c, 0.0} + minus_i_sin;
        const Complex minus = Complex{c, 0.0} - minus_i_sin;
        for (std::uint64_t b = 0; b < amps.size(); ++b) {
            amps[b] *= (std::popcount(b & word.z_mask()) & 1U) ? minus : plus;
        }
        return;
    }

    const std::uint64_t high = std::bit_floor(x);
    for (std::uint64_t b = 0; b < amps.size(); ++b) {
        if (b & high) {
            continue;
        }
        const std::uint64_t partner = b ^ x;
        const Complex pb = word_phase(word, y_phase, b);
        const Complex pp = word_phase(word, y_phase, partner);
        const Complex ab = amps[b];
        const Complex ap = amps[partner];
        amps[b] = c * ab + minus_i_sin * pp * ap;
        amps[partner] = c * ap + minus_i_sin * pb * ab;
    }
}

void apply_cnot(StateVector &state, std::size_t control, std::size_t target) {
    check_qubit(control, state.n_qubits());
    check_qubit(target, state.n_qubits());
    if (control == target) {
        throw std::invalid_argument("CNOT control and target must differ");
    }
    const std::uint64_t cbit = std::uint64_t{1} << control;
    const std::uint64_t tbit = std::uint64_t{1} << target;
    auto amps = state.amplitudes();
    for (std::uint64_t b = 0; b < amps.size(); ++b) {
        if ((b & cbit) && !(b & tbit)) {
            std::swap(amps[b], amps[b | tbit]);
        }
    }
}

void apply_pauli(StateVector &state, const PauliWord &word) {
    check_word_fits(word, state.n_qubits());
    auto amps = state.amplitudes();
    const std::uint64_t x = word.x_mask();
    const Complex y_phase = i_power(word.y_count()) * word.coefficient();
    if (x == 0) {
        for (std::uint64_t b = 0; b < amps.size(); ++b) {
            amps[b] *= word_phase(word, y_phase, b);
        }
        return;
    }
    const std::uint64_t high = std::bit_floor(x);
    for (std::uint64_t b = 0; b < amps.size(); ++b) {
        if (b & high) {
            continue;
        }
        const std::uint64_t partner = b ^ x;
        const Complex ab = amps[b];
        amps[b] = word_phase(word, y_phase, partner) * amps[partner];
        amps[partner] = word_phase(word, y_phase, b) * ab;
    }
}

StateVector apply_observable(const StateVector &state, const Observable &obs) {
    std::vector<Complex> out(state.size(), Complex{0.0, 0.0});
    for (const auto &term : obs.terms) {
        StateVector scratch = state;
        apply_pauli(scratch, term);
        const auto amps = scratch.amplitudes();
        for (std::size_t b = 0; b < out.size(); ++b) {
            out[b] += amps[b];
        }
    }
    return StateVector::from_amplitudes(state.n_qubits(), std::move(out));
}

Complex inner_product(const StateVector &bra, const StateVector &ket) {
    if (bra.size() != ket.size()) {
        throw std::invalid_argument("inner_product: state sizes differ");
    }
    Complex sum{0.0, 0.0};
    const auto a = bra.amplitudes();
    const auto b = ket.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::conj(a[i]) * b[i];
    }
    return sum;
}

Complex matrix_element(const StateVector &bra, const PauliWord &word, const StateVector &ket) {
    if (bra.size() != ket.size()) {
        throw std::invalid_argument("matrix_element: state sizes differ");
    }
    check_word_fits(word, ket.n_qubits());
    const auto a = bra.amplitudes();
    const auto k = ket.amplitudes();
    const std::uint64_t x = word.x_mask();
    const Complex y_phase = i_power(word.y_count());
    Complex sum{0.0, 0.0};
    for (std::uint64_t b = 0; b < k.size(); ++b) {
        sum += std::conj(a[b ^ x]) * word_phase(word, y_phase, b) * k[b];
    }
    return word.coefficient() * sum;
}

double expectation(const StateVector &state, const Observable &obs) {
    const double norm = state.norm();
    if (std::abs(norm - 1.0) > kNormTolerance) {
        throw std::domain_error("expectation: state norm " + std::to_string(norm) +
                                " deviates from 1");
    }
    Complex total{0.0, 0.0};
    for (const auto &term : obs.terms) {
        total += matrix_element(state, term, state);
    }
    if (std::abs(total.imag()) > kImagTolerance * std::max(1.0, obs.coefficient_l1())) {
        throw std::logic_error("expectation: non-negligible imaginary part");
    }
    return total.real();
}

} // namespace lipsqml
