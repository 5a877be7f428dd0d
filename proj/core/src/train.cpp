#include "lipsqml/train.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "lipsqml/bounds.hpp"
#include "lipsqml/parallel.hpp"

namespace lipsqml {

namespace {

// Keeps restart streams apart from the data (0) and noise (1) streams.
constexpr std::uint64_t kRestartStreamTag = std::uint64_t{1} << 32;

void add_regularizer_gradient(const Circuit &circuit, const ModelParams &params,
                              RegularizerKind kind, double lambda, Gradient &grad) {
    if (lambda == 0.0 || kind == RegularizerKind::none) {
        return;
    }
    for (std::size_t j = 0; j < circuit.rotation_count(); ++j) {
        const auto &rot = circuit.rotation(j);
        const auto row = static_cast<Eigen::Index>(j);
        if (kind == RegularizerKind::encoding_norm && rot.w_trainable) {
            grad.dW.row(row) += (2.0 * lambda * rot.scale * rot.scale) * params.W.row(row);
        } else if (kind == RegularizerKind::angle_norm && rot.theta_trainable) {
            grad.domega(row) += 2.0 * lambda * params.omega(row);
        }
    }
}

// Cost and gradient on data already mapped to the angle domain.
CostAndGradient cost_and_gradient_scaled(const Circuit &circuit, const ModelParams &params,
                                         const Observable &obs, const Dataset &scaled,
                                         const TrainConfig &config) {
    if (scaled.empty()) {
        throw std::invalid_argument("objective: empty dataset");
    }
    const auto n_rot = static_cast<Eigen::Index>(circuit.rotation_count());
    const auto dim = static_cast<Eigen::Index>(circuit.data_dim());
    CostAndGradient out{0.0, Gradient{Eigen::MatrixXd::Zero(n_rot, dim), Eigen::VectorXd::Zero(n_rot)}};
    const double inv_n = 1.0 / static_cast<double>(scaled.size());

    for (std::size_t k = 0; k < scaled.size(); ++k) {
        const auto x = scaled.point(k);
        const auto angles = encode_angles(circuit, params, x);
        const auto vg = adjoint_value_and_gradients(circuit, angles, obs);
        const double residual = vg.value - static_cast<double>(scaled.label(k));
        out.cost += residual * residual;
        // d/dphi (y - f)^2 = 2 (f - y) df/dphi
        const double weight = 2.0 * residual * inv_n;
        for (Eigen::Index j = 0; j < n_rot; ++j) {
            const double g = weight * vg.angle_grads[static_cast<std::size_t>(j)];
            out.grad.domega(j) += g;
            for (Eigen::Index c = 0; c < dim; ++c) {
                out.grad.dW(j, c) += g * x[static_cast<std::size_t>(c)];
            }
        }
    }
    out.cost *= inv_n;
    out.cost += config.lambda * regularizer_value(circuit, params, config.regularizer);
    add_regularizer_gradient(circuit, params, config.regularizer, config.lambda, out.grad);

    // Frozen entries carry no gradient.
    for (Eigen::Index j = 0; j < n_rot; ++j) {
        const auto &rot = circuit.rotation(static_cast<std::size_t>(j));
        if (!rot.w_trainable) {
            out.grad.dW.row(j).setZero();
        }
        if (!rot.theta_trainable) {
            out.grad.domega(j) = 0.0;
        }
    }
    return out;
}

double cost_scaled(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                   const Dataset &scaled, const TrainConfig &config) {
    if (scaled.empty()) {
        throw std::invalid_argument("objective: empty dataset");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < scaled.size(); ++k) {
        sum += loss_squared(scaled.label(k), forward(circuit, params, scaled.point(k), obs));
    }
    return sum / static_cast<double>(scaled.size()) +
           config.lambda * regularizer_value(circuit, params, config.regularizer);
}

struct RestartOutcome {
    std::vector<double> costs;
    ModelParams best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
};

RestartOutcome run_restart(const Circuit &circuit, const Observable &obs, const Dataset &scaled,
                           const TrainConfig &config, std::size_t restart) {
    RestartOutcome out;
    ModelParams params = random_init(circuit, config.seed, restart);
    out.best = params;
    out.costs.reserve(config.epochs);
    AdamState adam(flatten(params).size());
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto cg = cost_and_gradient_scaled(circuit, params, obs, scaled, config);
        out.costs.push_back(cg.cost);
        if (cg.cost < out.best_cost) {
            out.best_cost = cg.cost;
            out.best = params;
            out.best_epoch = epoch;
        }
        adam_step(circuit, params, cg.grad, adam, config.learning_rate);
    }
    return out;
}

} // namespace

std::string to_string(LossKind) { return "squared"; }

std::string to_string(RegularizerKind kind) {
    switch (kind) {
    case RegularizerKind::encoding_norm:
        return "encoding_norm";
    case RegularizerKind::angle_norm:
        return "angle_norm";
    case RegularizerKind::none:
        return "none";
    }
    return "none";
}

LossKind loss_kind_from_string(const std::string &name) {
    if (name == "squared") {
        return LossKind::squared;
    }
    throw std::invalid_argument("unknown loss '" + name + "'");
}

RegularizerKind regularizer_kind_from_string(const std::string &name) {
    if (name == "encoding_norm") {
        return RegularizerKind::encoding_norm;
    }
    if (name == "angle_norm") {
        return RegularizerKind::angle_norm;
    }
    if (name == "none") {
        return RegularizerKind::none;
    }
    throw std::invalid_argument("unknown regularizer '" + name + "'");
}

void TrainConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be non-negative");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("learning_rate must be positive");
    }
    if (epochs < 1) {
        throw std::invalid_argument("epochs must be at least 1");
    }
    if (restarts < 1) {
        throw std::invalid_argument("restarts must be at least 1");
    }
}

double loss_squared(int y, double y_hat) {
    const double r = static_cast<double>(y) - y_hat;
    return r * r;
}

double regularizer_encoding(const Circuit &circuit, const ModelParams &params) {
    circuit.check_params(params);
    double sum = 0.0;
    for (std::size_t j = 0; j < circuit.rotation_count(); ++j) {
        const auto &rot = circuit.rotation(j);
        if (rot.w_trainable) {
            sum += params.W.row(static_cast<Eigen::Index>(j)).squaredNorm() * rot.scale * rot.scale;
        }
    }
    return sum;
}

double regularizer_angles(const Circuit &circuit, const ModelParams &params) {
    circuit.check_params(params);
    if (circuit.has_trainable_encoding()) {
        throw std::invalid_argument(
            "angle regularizer applies to fixed-encoding circuits only");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < circuit.rotation_count(); ++j) {
        if (circuit.rotation(j).theta_trainable) {
            const double phi = params.omega(static_cast<Eigen::Index>(j));
            sum += phi * phi;
        }
    }
    return sum;
}

double regularizer_value(const Circuit &circuit, const ModelParams &params, RegularizerKind kind) {
    switch (kind) {
    case RegularizerKind::encoding_norm:
        return regularizer_encoding(circuit, params);
    case RegularizerKind::angle_norm:
        return regularizer_angles(circuit, params);
    case RegularizerKind::none:
        return 0.0;
    }
    return 0.0;
}

double objective(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                 const Dataset &data, const TrainConfig &config) {
    return cost_scaled(circuit, params, obs, rescale_dataset(data), config);
}

CostAndGradient objective_and_gradient(const Circuit &circuit, const ModelParams &params,
                                       const Observable &obs, const Dataset &data,
                                       const TrainConfig &config) {
    return cost_and_gradient_scaled(circuit, params, obs, rescale_dataset(data), config);
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState &state,
               double learning_rate, std::span<const std::uint8_t> mask, const AdamHyper &hyper) {
    if (grad.size() != params.size() || state.m.size() != params.size() ||
        state.v.size() != params.size() || (!mask.empty() && mask.size() != params.size())) {
        throw std::invalid_argument("adam_step: shape mismatch");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(hyper.beta1, t);
    const double correction2 = 1.0 - std::pow(hyper.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!mask.empty() && mask[i] == 0) {
            continue;
        }
        state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * grad[i];
        state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / correction1;
        const double v_hat = state.v[i] / correction2;
        params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
}

std::vector<double> flatten(const ModelParams &params) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(params.W.size() + params.omega.size()));
    for (Eigen::Index j = 0; j < params.W.rows(); ++j) {
        for (Eigen::Index k = 0; k < params.W.cols(); ++k) {
            flat.push_back(params.W(j, k));
        }
    }
    for (Eigen::Index j = 0; j < params.omega.size(); ++j) {
        flat.push_back(params.omega(j));
    }
    return flat;
}

void unflatten(std::span<const double> flat, ModelParams &params) {
    if (flat.size() != static_cast<std::size_t>(params.W.size() + params.omega.size())) {
        throw std::invalid_argument("unflatten: size mismatch");
    }
    std::size_t i = 0;
    for (Eigen::Index j = 0; j < params.W.rows(); ++j) {
        for (Eigen::Index k = 0; k < params.W.cols(); ++k) {
            params.W(j, k) = flat[i++];
        }
    }
    for (Eigen::Index j = 0; j < params.omega.size(); ++j) {
        params.omega(j) = flat[i++];
    }
}

std::vector<double> flatten(const Gradient &grad) {
    return flatten(ModelParams{grad.dW, grad.domega});
}

std::vector<std::uint8_t> trainable_mask(const Circuit &circuit) {
    std::vector<std::uint8_t> mask;
    for (std::size_t j = 0; j < circuit.rotation_count(); ++j) {
        const bool w = circuit.rotation(j).w_trainable;
        for (std::size_t k = 0; k < circuit.data_dim(); ++k) {
            mask.push_back(w ? 1 : 0);
        }
    }
    for (std::size_t j = 0; j < circuit.rotation_count(); ++j) {
        mask.push_back(circuit.rotation(j).theta_trainable ? 1 : 0);
    }
    return mask;
}

void adam_step(const Circuit &circuit, ModelParams &params, const Gradient &grad,
               AdamState &state, double learning_rate, const AdamHyper &hyper) {
    circuit.check_params(params);
    auto flat = flatten(params);
    const auto g = flatten(grad);
    const auto mask = trainable_mask(circuit);
    adam_step(flat, g, state, learning_rate, mask, hyper);
    unflatten(flat, params);
}

ModelParams random_init(const Circuit &circuit, std::uint64_t seed, std::uint64_t restart) {
    auto rng = make_rng(seed, kRestartStreamTag | restart);
    std::uniform_real_distribution<double> weight(-1.0, 1.0);
    std::uniform_real_distribution<double> offset(-std::numbers::pi, std::numbers::pi);
    ModelParams params = circuit.default_params();
    for (std::size_t j = 0; j < circuit.rotation_count(); ++j) {
        const auto &rot = circuit.rotation(j);
        const auto row = static_cast<Eigen::Index>(j);
        if (rot.w_trainable) {
            for (Eigen::Index k = 0; k < params.W.cols(); ++k) {
                params.W(row, k) = weight(rng);
            }
        }
        if (rot.theta_trainable) {
            params.omega(row) = offset(rng);
        }
    }
    return params;
}

TrainResult train(const Circuit &circuit, const Observable &obs, const Dataset &data,
                  const TrainConfig &config) {
    config.validate();
    if (data.dim() != circuit.data_dim()) {
        throw std::invalid_argument("train: dataset dimension does not match circuit");
    }
    // Fail early on regularizer misuse rather than inside a worker.
    (void)regularizer_value(circuit, circuit.default_params(), config.regularizer);

    const Dataset scaled = rescale_dataset(data);
    std::vector<RestartOutcome> outcomes(config.restarts);
    parallel_for(config.restarts, config.threads, [&](std::size_t r) {
        outcomes[r] = run_restart(circuit, obs, scaled, config, r);
    });

    TrainResult result;
    result.best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        if (outcomes[r].best_cost < result.best_cost) {
            result.best_cost = outcomes[r].best_cost;
            result.best_params = outcomes[r].best;
            result.best_restart = r;
            result.best_epoch = outcomes[r].best_epoch;
        }
        result.history.push_back(std::move(outcomes[r].costs));
    }
    result.lipschitz_bound = lipschitz_tight(circuit, result.best_params, obs);
    return result;
}

} // namespace lipsqml
