#pragma once

/**
 * @file config.hpp
 * Experiment configuration: paper preset, merge, schema validation.
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <lipsqml/serialize.hpp>

namespace lipsqml::cli {

/// Invalid configuration; `path` is a dotted JSON path such as "train.lambda".
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string path, const std::string &message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

    [[nodiscard]] const std::string &path() const { return path_; }

  private:
    std::string path_;
};

struct CircuitSpec {
    std::size_t qubits = 3;
    std::size_t layers = 3;
    std::string encoding = "trainable";
};

struct DataSpec {
    std::size_t n_train = 200;
    std::size_t n_test = 10000;
    std::uint64_t seed = 0;
    std::uint64_t test_seed = 1;
};

struct SweepSpec {
    std::vector<double> lambda_grid;
    std::vector<double> eps_grid;
    std::size_t noise_samples = 200;
    std::uint64_t noise_seed = 0;
    WorstCaseMode worst_case_mode = WorstCaseMode::per_point;
    std::size_t robustness_test_points = 1000;
    std::vector<std::string> models;
};

struct ExperimentConfig {
    std::optional<std::string> model_id;
    CircuitSpec circuit;
    Observable observable;
    TrainConfig train;
    DataSpec data;
    SweepSpec sweep;
    std::string output_dir = ".";

    /// The merged, validated document.
    json resolved;
    /// FNV-1a of resolved.dump(), 16 hex digits.
    std::string hash;
};

/// The published schema (embedded at build time).
const json &config_schema();

/// 3 qubits, 3 layers, M = ZZZ, n = 200, lr 0.1, 200 epochs, 9 restarts.
json paper_preset();

/**
 * Validates `doc` against a JSON-schema subset: type, properties,
 * additionalProperties, required, enum, minimum/maximum (and exclusive
 * variants), minItems, minLength, items, pattern. Throws ConfigError at the
 * first violation.
 */
void validate_schema(const json &doc, const json &schema, const std::string &path = "");

/// Merges `user` over the preset, validates, and checks cross-field rules.
ExperimentConfig resolve_config(const json &user);

/// Reads the file at `path` (if any) and resolves it. A missing or malformed
/// file raises ConfigError.
ExperimentConfig load_config(const std::optional<std::string> &path);

Circuit build_circuit(const CircuitSpec &spec);

std::string fnv1a_hex(std::string_view bytes);

} // namespace lipsqml::cli
