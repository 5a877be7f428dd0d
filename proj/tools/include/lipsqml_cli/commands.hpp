#pragma once

/**
 * @file commands.hpp
 * The lipsqml subcommands, callable in-process.
 *
 * Exit codes: 0 success, 1 runtime failure, 2 configuration or usage error.
 */

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lipsqml_cli/config.hpp"

namespace lipsqml::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Missing or unreadable inputs (exit 1).
class RuntimeFailure : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// LIPSQML_THREADS (0 or unset = hardware concurrency).
std::size_t threads_from_env();

/// A model file as written by `train`.
struct LoadedModel {
    TrainedModel model;
    std::string encoding;
    DataSpec data;
    double test_accuracy = 0.0;
    json document;
};

json model_document(const ExperimentConfig &cfg, const std::string &model_id,
                    const Circuit &circuit, const ModelParams &params, const TrainResult &trained,
                    double lambda, double train_acc, double test_acc);
LoadedModel load_model(const std::string &path);

/// "<encoding>-lambda-<value>" unless the config names the model.
std::string default_model_id(const ExperimentConfig &cfg, double lambda);

void cmd_generate_data(std::size_t n, std::uint64_t seed, const std::string &out_path);

/// Writes <out> (model JSON) and <out stem>.history.csv.
void cmd_train(const ExperimentConfig &cfg, const std::string &out_path, std::ostream &log);

struct BoundOptions {
    std::optional<double> n;
    double delta = 0.05;
    std::optional<double> gamma;
};
json cmd_bound(const std::string &model_path, const BoundOptions &options);

/// mode: "robustness" or "lambda". Writes <out_dir>/<mode>_sweep.{csv,json,dat}.
void cmd_sweep(const std::string &mode, const ExperimentConfig &cfg, const std::string &out_dir,
               std::ostream &log);

/// Full command line (args[0] is the program name) → exit code.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace lipsqml::cli
