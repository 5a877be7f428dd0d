#pragma once

/**
 * @file serialize.hpp
 * JSON and CSV persistence.
 *
 * Circuit JSON (encoding values taken from the accompanying params):
 *
 *   {"n_qubits": 3, "data_dim": 2, "ops": [
 *     {"kind": "rotation", "qubits": [0], "generator": "Z", "scale": 0.5,
 *      "w": [0.1, -0.2], "theta": 0.3, "trainable_mask": {"w": true, "theta": true}},
 *     {"kind": "cnot", "qubits": [0, 1]}]}
 *
 * Character k of "generator" acts on qubits[k]. Loading errors throw
 * std::runtime_error naming the offending JSON path.
 */

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipsqml/bounds.hpp"
#include "lipsqml/data.hpp"
#include "lipsqml/model.hpp"
#include "lipsqml/sweep.hpp"
#include "lipsqml/train.hpp"

namespace lipsqml {

using nlohmann::json;

/// [{"pauli": "ZZZ", "coefficient": 1.0}, ...]; character i acts on qubit i.
json observable_to_json(const Observable &obs);
Observable observable_from_json(const json &j, const std::string &path = "observable");

json circuit_to_json(const Circuit &circuit, const ModelParams &params);
/// Returns the circuit (defaults = stored values) and the stored params.
std::pair<Circuit, ModelParams> circuit_from_json(const json &j,
                                                  const std::string &path = "circuit");

json bound_report_to_json(const BoundReport &report);

/// Best cost/restart/epoch and the Lipschitz bound; history goes to CSV.
json train_result_summary_to_json(const TrainResult &result);

json sweep_record_to_json(const SweepRecord &record);
json sweep_result_to_json(const SweepResult &result);

/// Header "x1,...,xd,label", one row per point.
void write_dataset_csv(std::ostream &out, const Dataset &data);
Dataset read_dataset_csv(std::istream &in, const std::string &source = "<stream>");

/// Header "restart,epoch,cost".
void write_history_csv(std::ostream &out, const TrainResult &result);

/// Writes `content` to `path`, throwing std::runtime_error with the path on failure.
void write_text_file(const std::string &path, const std::string &content);
std::string read_text_file(const std::string &path);
json read_json_file(const std::string &path);

} // namespace lipsqml
