#pragma once

/**
 * @file train.hpp
 * Lipschitz-regularized empirical risk minimization with full-batch ADAM.
 *
 * Datasets passed to this module hold raw points in [-1, 1]^d; the pi
 * rescaling into the angle domain happens inside.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lipsqml/data.hpp"
#include "lipsqml/grad.hpp"
#include "lipsqml/model.hpp"

namespace lipsqml {

enum class LossKind { squared };

enum class RegularizerKind {
    encoding_norm, ///< sum_j ||w_j||^2 ||H_j||^2 over trainable-encoding rotations
    angle_norm,    ///< sum of squared free angles; fixed-encoding circuits only
    none,
};

std::string to_string(LossKind kind);
std::string to_string(RegularizerKind kind);
LossKind loss_kind_from_string(const std::string &name);
RegularizerKind regularizer_kind_from_string(const std::string &name);

struct TrainConfig {
    double lambda = 0.0;
    double learning_rate = 0.1;
    std::size_t epochs = 200;
    std::size_t restarts = 9;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::squared;
    RegularizerKind regularizer = RegularizerKind::encoding_norm;
    /// Worker threads for restarts (0 = hardware). Results do not depend on it.
    std::size_t threads = 1;

    /// Throws std::invalid_argument when out of range.
    void validate() const;
};

struct TrainResult {
    ModelParams best_params;
    double best_cost = 0.0;
    std::size_t best_restart = 0;
    std::size_t best_epoch = 0;
    /// history[r][e]: cost of restart r evaluated before update e.
    std::vector<std::vector<double>> history;
    /// lipschitz_tight of best_params, angle domain.
    double lipschitz_bound = 0.0;
};

/// (y - y_hat)^2
double loss_squared(int y, double y_hat);

double regularizer_encoding(const Circuit &circuit, const ModelParams &params);

/// Sum of squared trainable offsets. Throws std::invalid_argument on a
/// circuit with a trainable encoding.
double regularizer_angles(const Circuit &circuit, const ModelParams &params);

double regularizer_value(const Circuit &circuit, const ModelParams &params, RegularizerKind kind);

struct CostAndGradient {
    double cost = 0.0;
    Gradient grad;
};

/// (1/n) sum_k loss(f(pi x_k), y_k) + lambda * regularizer.
double objective(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                 const Dataset &data, const TrainConfig &config);

CostAndGradient objective_and_gradient(const Circuit &circuit, const ModelParams &params,
                                       const Observable &obs, const Dataset &data,
                                       const TrainConfig &config);

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;

    explicit AdamState(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

/**
 * Bias-corrected ADAM update on a flat parameter vector. Entries whose mask
 * value is 0 keep their value and moments. An empty mask means all
 * entries are trainable.
 */
void adam_step(std::span<double> params, std::span<const double> grad, AdamState &state,
               double learning_rate, std::span<const std::uint8_t> mask = {}, const AdamHyper &hyper = {});

/// Flat layout used for ADAM: W row-major, then omega.
std::vector<double> flatten(const ModelParams &params);
void unflatten(std::span<const double> flat, ModelParams &params);
std::vector<double> flatten(const Gradient &grad);
/// Trainable mask in the flat layout.
std::vector<std::uint8_t> trainable_mask(const Circuit &circuit);

/// ModelParams overload; masked entries follow the circuit.
void adam_step(const Circuit &circuit, ModelParams &params, const Gradient &grad,
               AdamState &state, double learning_rate, const AdamHyper &hyper = {});

/**
 * Random start: trainable offsets uniform in [-pi, pi], trainable weights
 * uniform in [-1, 1]; frozen entries keep the circuit defaults.
 */
ModelParams random_init(const Circuit &circuit, std::uint64_t seed, std::uint64_t restart);

/**
 * Runs `restarts` independent full-batch ADAM runs for `epochs` epochs each
 * and keeps the parameters with the lowest recorded cost over all runs and
 * epochs (ties go to the lower restart index, then the earlier epoch).
 */
TrainResult train(const Circuit &circuit, const Observable &obs, const Dataset &data,
                  const TrainConfig &config);

} // namespace lipsqml
