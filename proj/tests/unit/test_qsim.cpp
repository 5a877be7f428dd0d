#include <doctest.h>

#include <numbers>

#include <lipsqml/qsim.hpp>

#include "dense_oracle.hpp"

using namespace lipsqml;
using std::numbers::pi;

namespace {

constexpr double kTol = 1e-12;

void check_amplitudes(const StateVector &s, const std::vector<Complex> &expected, double tol = kTol) {
    REQUIRE(s.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        CHECK(std::abs(s[k] - expected[k]) < tol);
    }
}

StateVector basis(std::size_t n, std::size_t index) {
    std::vector<Complex> a(std::size_t{1} << n);
    a[index] = 1.0;
    return StateVector::from_amplitudes(n, a);
}

} // namespace

TEST_CASE("init_zero_state puts all weight on |0...0>") {
    check_amplitudes(init_zero_state(1), {1.0, 0.0});
    check_amplitudes(init_zero_state(2), {1.0, 0.0, 0.0, 0.0});
    const auto s3 = init_zero_state(3);
    CHECK(s3.size() == 8);
    CHECK(s3[0] == Complex(1.0, 0.0));
    for (std::size_t k = 1; k < 8; ++k) {
        CHECK(s3[k] == Complex(0.0, 0.0));
    }
}

TEST_CASE("init_zero_state rejects sizes outside the guard") {
    CHECK_THROWS_AS(init_zero_state(0), std::invalid_argument);
    CHECK_THROWS_AS(init_zero_state(kMaxQubits + 1), std::invalid_argument);
    CHECK_NOTHROW(init_zero_state(kMaxQubits));
}

TEST_CASE("PauliWord parsing, masks and formatting") {
    const auto w = PauliWord::from_string("XIYZ", 0.25);
    CHECK(w.factors().size() == 3);
    CHECK(w.x_mask() == 0b0101);
    CHECK(w.z_mask() == 0b1100);
    CHECK(w.y_count() == 1);
    CHECK(w.min_qubits() == 4);
    CHECK(w.to_string(5) == "XIYZI");
    CHECK(PauliWord::from_string("III").is_identity());
    CHECK_THROWS_AS(PauliWord::from_string("XQ"), std::invalid_argument);
    CHECK_THROWS_AS(PauliWord({{0, Pauli::X}, {0, Pauli::Z}}), std::invalid_argument);
    CHECK_THROWS_AS(PauliWord({{64, Pauli::X}}), std::out_of_range);
}

TEST_CASE("R_Y(pi)|0> = |1> and R_Z(theta)|0> = e^{-i theta/2}|0>") {
    auto s = init_zero_state(1);
    apply_pauli_rotation(s, PauliWord::single(Pauli::Y, 0, 0.5), pi);
    check_amplitudes(s, {0.0, 1.0});

    const double theta = 0.83;
    auto z = init_zero_state(1);
    apply_pauli_rotation(z, PauliWord::single(Pauli::Z, 0, 0.5), theta);
    check_amplitudes(z, {std::exp(Complex(0.0, -theta / 2.0)), 0.0});
}

TEST_CASE("Pauli rotations match the dense matrix exponential") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(-2.0 * pi, 2.0 * pi);
    std::uniform_real_distribution<double> coef(-1.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3;
        auto s = oracle::random_state(n, rng);
        const auto v0 = oracle::to_vec(s);
        const auto word = oracle::random_word(2, rng).with_coefficient(coef(rng));
        const double a = ang(rng);
        apply_pauli_rotation(s, word, a);
        const oracle::Vec expected = oracle::rotation(word, a, n) * v0;
        CHECK(oracle::max_abs_diff(s, expected) < 1e-9);
        CHECK(std::abs(s.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("rotation composition: angle a then b equals a + b") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ang(-pi, pi);
    for (int trial = 0; trial < 20; ++trial) {
        auto s1 = oracle::random_state(3, rng);
        auto s2 = s1;
        const auto word = oracle::random_word(3, rng).with_coefficient(0.5);
        const double a = ang(rng);
        const double b = ang(rng);
        apply_pauli_rotation(s1, word, a);
        apply_pauli_rotation(s1, word, b);
        apply_pauli_rotation(s2, word, a + b);
        CHECK(oracle::max_abs_diff(s1, oracle::to_vec(s2)) < 1e-10);
    }
}

TEST_CASE("rotation rejects out-of-range qubits") {
    auto s = init_zero_state(2);
    CHECK_THROWS_AS(apply_pauli_rotation(s, PauliWord::single(Pauli::X, 2), 0.1),
                    std::out_of_range);
}

TEST_CASE("CNOT truth table and Bell state") {
    // |10>: high bit (qubit 1) set, index 2.
    auto s = basis(2, 0b10);
    apply_cnot(s, 1, 0);
    check_amplitudes(s, {0.0, 0.0, 0.0, 1.0});

    auto zero = init_zero_state(2);
    apply_cnot(zero, 0, 1);
    check_amplitudes(zero, {1.0, 0.0, 0.0, 0.0});
    apply_cnot(zero, 1, 0);
    check_amplitudes(zero, {1.0, 0.0, 0.0, 0.0});

    const double r = 1.0 / std::sqrt(2.0);
    auto bell = StateVector::from_amplitudes(2, {r, 0.0, r, 0.0});
    apply_cnot(bell, 1, 0);
    check_amplitudes(bell, {r, 0.0, 0.0, r});
}

TEST_CASE("CNOT errors") {
    auto s = init_zero_state(2);
    CHECK_THROWS_AS(apply_cnot(s, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(apply_cnot(s, 0, 2), std::out_of_range);
    CHECK_THROWS_AS(apply_cnot(s, 5, 0), std::out_of_range);
}

TEST_CASE("expectation examples") {
    CHECK(expectation(init_zero_state(3), Observable::z_string(3)) == 1.0);
    CHECK(expectation(basis(1, 1), Observable{{PauliWord::single(Pauli::Z, 0)}}) ==
          doctest::Approx(-1.0));
    const double r = 1.0 / std::sqrt(2.0);
    const auto plus = StateVector::from_amplitudes(1, {r, r});
    CHECK(expectation(plus, Observable{{PauliWord::single(Pauli::X, 0)}}) ==
          doctest::Approx(1.0));
}

TEST_CASE("expectation rejects unnormalized states") {
    const auto s = StateVector::from_amplitudes(1, {1.0, 1.0});
    CHECK_THROWS_AS(expectation(s, Observable{{PauliWord::single(Pauli::Z, 0)}}),
                    std::domain_error);
    const auto tiny = StateVector::from_amplitudes(1, {1.0 + 1e-9, 0.0});
    CHECK_NOTHROW(expectation(tiny, Observable{{PauliWord::single(Pauli::Z, 0)}}));
}

TEST_CASE("expectation agrees with the dense observable and is bounded by the l1 norm") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = oracle::random_state(3, rng);
        Observable obs;
        for (int t = 0; t < 4; ++t) {
            obs.terms.push_back(oracle::random_word(3, rng).with_coefficient(c(rng)));
        }
        const auto v = oracle::to_vec(s);
        const double dense = v.dot(oracle::observable_matrix(obs, 3) * v).real();
        const double e = expectation(s, obs);
        CHECK(std::abs(e - dense) < 1e-12);
        CHECK(std::abs(e) <= obs.coefficient_l1() + 1e-12);
    }
}

TEST_CASE("identity term contributes its coefficient") {
    Observable obs{{PauliWord({}, 0.7), PauliWord::single(Pauli::Z, 0, 0.2)}};
    CHECK(expectation(init_zero_state(2), obs) == doctest::Approx(0.9));
}

TEST_CASE("random circuits match the dense product oracle and keep unit norm") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> ang(-pi, pi);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
        const auto c = oracle::random_circuit(n, 1, 12, rng);
        std::vector<double> angles(c.rotation_count());
        for (auto &a : angles) {
            a = ang(rng);
        }
        const auto s = lipsqml::prepare_state(c, angles);
        const oracle::Vec expected = oracle::circuit_unitary(c, angles) * oracle::zero_state(n);
        CHECK(oracle::max_abs_diff(s, expected) < 1e-9);
        CHECK(std::abs(s.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("matrix_element equals the dense sandwich") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = oracle::random_state(3, rng);
        const auto b = oracle::random_state(3, rng);
        const auto w = oracle::random_word(3, rng).with_coefficient(-0.3);
        const Complex dense = oracle::to_vec(a).dot(oracle::word_matrix(w, 3) * oracle::to_vec(b));
        CHECK(std::abs(matrix_element(a, w, b) - dense) < 1e-12);
    }
}
