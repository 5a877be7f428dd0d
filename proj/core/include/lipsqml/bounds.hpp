#pragma once

/**
 * @file bounds.hpp
 * Closed-form Lipschitz bounds of affine-encoding quantum models and the
 * covering-number generalization bound built on them.
 *
 * All Lipschitz values are w.r.t. the model's own input, i.e. the angle
 * domain [-pi, pi]^d after preprocessing. BoundReport also carries the
 * raw-data-space values, which are larger by the preprocessing slope pi.
 */

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lipsqml/model.hpp"

namespace lipsqml {

enum class NormMode { exact, upper };

/// Maximum qubit count for the dense eigensolve in NormMode::exact.
inline constexpr std::size_t kExactNormMaxQubits = 12;

/**
 * exact: largest |eigenvalue| of the dense matrix.
 * upper: sum of |coefficients| (triangle inequality).
 */
double spectral_norm(const Observable &obs, NormMode mode = NormMode::exact);

/// 2 ||M|| sum_j ||w_j|| |s_j|, over every rotation (frozen rows included).
double lipschitz_tight(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                       NormMode mode = NormMode::exact);

/// 2 ||M|| sigma_max(W) sum_j |s_j|.
double lipschitz_simple(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                        NormMode mode = NormMode::exact);

/// ||w_j|| |s_j| for every rotation j.
std::vector<double> per_gate_terms(const Circuit &circuit, const ModelParams &params);

enum class DomainConvention { raw_data_space, scaled_data_space };

std::string to_string(DomainConvention c);

struct BoundReport {
    double lipschitz_tight = 0.0;
    double lipschitz_simple = 0.0;
    double obs_norm = 0.0;
    std::vector<double> per_gate_terms;
    DomainConvention domain_convention = DomainConvention::scaled_data_space;
    /// Multiplier from the reporting domain back to raw data (pi for scaled).
    double raw_space_factor = 1.0;

    [[nodiscard]] double lipschitz_tight_raw() const { return lipschitz_tight * raw_space_factor; }
    [[nodiscard]] double lipschitz_simple_raw() const {
        return lipschitz_simple * raw_space_factor;
    }
};

BoundReport make_bound_report(const Circuit &circuit, const ModelParams &params,
                              const Observable &obs, NormMode mode = NormMode::exact);

/// (6 R / gamma)^(d + 1): covering number of Z = X x Y at radius gamma / 2.
double covering_number_upper(double radius, double gamma, std::size_t data_dim);

/// gamma = n^(-1 / (2d + 2)).
double auto_gamma(double n, std::size_t data_dim);

struct GenBoundInputs {
    double lipschitz = 0.0;       ///< L_Theta (>= 0)
    double loss_lipschitz = 0.0;  ///< L_loss
    double loss_sup = 0.0;        ///< sup of the loss over Y x Y
    double radius = 0.0;          ///< radius of the smallest ball containing Z
    std::size_t data_dim = 0;
    double n = 0.0;               ///< sample count
    double delta = 0.05;          ///< confidence 1 - delta
    std::optional<double> gamma;  ///< nullopt = auto_gamma(n, d)
};

/// Defaults for the squared loss with y in {-1, 1}, f in [-1, 1] on [-pi, pi]^d.
GenBoundInputs squared_loss_defaults(double lipschitz, std::size_t data_dim, double n,
                                     double delta = 0.05);

/**
 * @brief gamma L_loss max{1, L} + M sqrt((2 N(gamma/2, Z) ln 2 + 2 ln(1/delta)) / n).
 *
 * N(gamma/2, Z) is replaced by covering_number_upper. Throws
 * std::invalid_argument for non-positive inputs or delta outside (0, 1).
 */
double generalization_bound(const GenBoundInputs &inputs);

} // namespace lipsqml
