#pragma once

/**
 * @file sweep.hpp
 * Accuracy metrics and the robustness / regularization sweeps.
 *
 * Test points are raw ([-1, 1]^d). Noise is added in that space and the
 * result is mapped to the angle domain before evaluation.
 */

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lipsqml/data.hpp"
#include "lipsqml/model.hpp"
#include "lipsqml/train.hpp"

namespace lipsqml {

enum class WorstCaseMode {
    per_point,   ///< a point counts only if every noisy copy is classified correctly
    per_dataset, ///< worst accuracy over the noise instantiations of the whole set
};

std::string to_string(WorstCaseMode mode);
WorstCaseMode worst_case_mode_from_string(const std::string &name);

/// A trained model together with what the sweeps need to report about it.
struct TrainedModel {
    std::string id;
    Circuit circuit{1, 1};
    ModelParams params;
    Observable obs;
    double lambda = 0.0;
    double train_accuracy = 0.0;
    std::uint64_t seed = 0;
};

/// Fraction of points with predict(pi x) == label.
double accuracy(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                const Dataset &data, std::size_t threads = 1);

struct WorstCaseOutcome {
    double accuracy = 0.0;
    /// Points whose margin |f(x)| exceeds L_raw * eps * sqrt(d).
    std::size_t certified_points = 0;
    /// Certified points whose prediction changed under some sample. Always 0
    /// for a valid Lipschitz bound.
    std::size_t certificate_violations = 0;
};

/**
 * @brief Accuracy under sampled perturbations x + eps * u, u in noise.
 *
 * The clean point is part of every check, so the result never exceeds the
 * clean accuracy. `lipschitz_raw` is a Lipschitz bound w.r.t. raw inputs and
 * is only used for the certificate bookkeeping.
 */
WorstCaseOutcome worst_case_evaluate(const Circuit &circuit, const ModelParams &params,
                                     const Observable &obs, const Dataset &data,
                                     const NoiseBatch &noise, double eps, WorstCaseMode mode,
                                     double lipschitz_raw, std::size_t threads = 1);

/// Convenience wrapper that draws an m-sample NoiseBatch from `seed`.
double worst_case_accuracy(const Circuit &circuit, const ModelParams &params,
                           const Observable &obs, const Dataset &data, double eps,
                           std::size_t samples, std::uint64_t seed,
                           WorstCaseMode mode = WorstCaseMode::per_point, std::size_t threads = 1);

/// One row of a sweep table.
struct SweepRecord {
    std::string model_id;
    double lambda = 0.0;
    double eps_bar = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double worst_case_acc = 0.0;
    double lipschitz_tight = 0.0;
    double lipschitz_simple = 0.0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::string axis; ///< "lambda" or "eps_bar"
    std::vector<SweepRecord> records;
};

/// 0, 0.02, ..., 0.2
std::vector<double> default_eps_grid();
/// 0, 0.05, ..., 0.5
std::vector<double> default_lambda_grid();

struct RobustnessOptions {
    std::vector<double> eps_grid = default_eps_grid();
    std::size_t samples = 200;
    std::uint64_t noise_seed = 0;
    WorstCaseMode mode = WorstCaseMode::per_point;
    std::size_t threads = 1;
};

/**
 * Worst-case accuracy of every model at every eps. Records are ordered by eps,
 * then model id. Throws std::logic_error if a certified point ever flips.
 */
SweepResult robustness_sweep(const std::vector<TrainedModel> &models, const Dataset &test,
                             const RobustnessOptions &options);

struct GeneralizationSweep {
    SweepResult result;
    std::vector<TrainedModel> models;
    std::vector<TrainResult> trainings; ///< parallel to models
};

/// Called once per finished lambda (serialized; completion order may vary).
using SweepProgress = std::function<void(const SweepRecord &)>;

/**
 * Trains one model per lambda (train_config.lambda is overridden) and records
 * train/test accuracy and both Lipschitz bounds. `threads` fans out over the
 * lambda values; each training runs its restarts serially.
 */
GeneralizationSweep generalization_sweep(const std::vector<double> &lambda_grid,
                                         const Circuit &circuit, const Observable &obs,
                                         const TrainConfig &train_config, const Dataset &train,
                                         const Dataset &test, const std::string &id_prefix,
                                         std::size_t threads = 1,
                                         const SweepProgress &progress = {});

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Columns: model_id, lambda, eps_bar, train_acc, test_acc, worst_case_acc,
/// lipschitz_tight, lipschitz_simple, seed.
void write_sweep_csv(std::ostream &out, const SweepResult &result);

/// Whitespace-separated columns, one blank-line separated block per model.
void write_sweep_gnuplot(std::ostream &out, const SweepResult &result);

/// Spearman rank correlation (average ranks for ties).
double spearman_correlation(const std::vector<double> &a, const std::vector<double> &b);

} // namespace lipsqml
