#include "lipsqml_cli/config.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>

#include "schema_embed.hpp"

namespace lipsqml::cli {

namespace {

std::string join(const std::string &path, const std::string &key) {
    return path.empty() ? key : path + "." + key;
}

std::string display(const std::string &path) { return path.empty() ? "<root>" : path; }

bool has_type(const json &v, const std::string &type) {
    if (type == "object") {
        return v.is_object();
    }
    if (type == "array") {
        return v.is_array();
    }
    if (type == "string") {
        return v.is_string();
    }
    if (type == "boolean") {
        return v.is_boolean();
    }
    if (type == "integer") {
        return v.is_number_integer();
    }
    if (type == "number") {
        return v.is_number();
    }
    if (type == "null") {
        return v.is_null();
    }
    throw std::logic_error("schema uses unsupported type '" + type + "'");
}

template <class T> T get_as(const json &doc, const char *section, const char *key) {
    return doc.at(section).at(key).get<T>();
}

} // namespace

const json &config_schema() {
    static const json schema = json::parse(detail::kConfigSchema);
    return schema;
}

json paper_preset() {
    json lambda_grid = json::array();
    for (double v : default_lambda_grid()) {
        lambda_grid.push_back(v);
    }
    json eps_grid = json::array();
    for (double v : default_eps_grid()) {
        eps_grid.push_back(v);
    }
    return {
        {"circuit", {{"qubits", 3}, {"layers", 3}, {"encoding", "trainable"}}},
        {"observable", json::array({{{"pauli", "ZZZ"}, {"coefficient", 1.0}}})},
        {"train",
         {{"lambda", 0.0},
          {"learning_rate", 0.1},
          {"epochs", 200},
          {"restarts", 9},
          {"seed", 0},
          {"loss", "squared"},
          {"regularizer", "auto"}}},
        {"data", {{"n_train", 200}, {"n_test", 10000}, {"seed", 0}, {"test_seed", 1}}},
        {"sweep",
         {{"lambda_grid", lambda_grid},
          {"eps_grid", eps_grid},
          {"noise_samples", 200},
          {"noise_seed", 0},
          {"worst_case_mode", "per_point"},
          {"robustness_test_points", 1000},
          {"models", json::array()}}},
        {"output_dir", "."},
    };
}

void validate_schema(const json &doc, const json &schema, const std::string &path) {
    if (const auto it = schema.find("type"); it != schema.end()) {
        const auto type = it->get<std::string>();
        if (!has_type(doc, type)) {
            throw ConfigError(display(path), "expected " + type);
        }
    }
    if (const auto it = schema.find("enum"); it != schema.end()) {
        if (std::find(it->begin(), it->end(), doc) == it->end()) {
            throw ConfigError(display(path), "must be one of " + it->dump());
        }
    }
    if (doc.is_number()) {
        const double v = doc.get<double>();
        if (schema.contains("minimum") && v < schema["minimum"].get<double>()) {
            throw ConfigError(display(path), "must be >= " + schema["minimum"].dump());
        }
        if (schema.contains("maximum") && v > schema["maximum"].get<double>()) {
            throw ConfigError(display(path), "must be <= " + schema["maximum"].dump());
        }
        if (schema.contains("exclusiveMinimum") &&
            v <= schema["exclusiveMinimum"].get<double>()) {
            throw ConfigError(display(path), "must be > " + schema["exclusiveMinimum"].dump());
        }
        if (schema.contains("exclusiveMaximum") &&
            v >= schema["exclusiveMaximum"].get<double>()) {
            throw ConfigError(display(path), "must be < " + schema["exclusiveMaximum"].dump());
        }
    }
    if (doc.is_string()) {
        const auto &s = doc.get_ref<const std::string &>();
        if (schema.contains("minLength") && s.size() < schema["minLength"].get<std::size_t>()) {
            throw ConfigError(display(path), "string too short");
        }
        if (schema.contains("pattern") &&
            !std::regex_search(s, std::regex(schema["pattern"].get<std::string>()))) {
            throw ConfigError(display(path),
                              "does not match pattern " + schema["pattern"].dump());
        }
    }
    if (doc.is_array()) {
        if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>()) {
            throw ConfigError(display(path), "needs at least " + schema["minItems"].dump() +
                                                 " item(s)");
        }
        if (const auto it = schema.find("items"); it != schema.end()) {
            for (std::size_t i = 0; i < doc.size(); ++i) {
                validate_schema(doc[i], *it, path + "[" + std::to_string(i) + "]");
            }
        }
    }
    if (doc.is_object()) {
        const auto props = schema.find("properties");
        if (const auto it = schema.find("required"); it != schema.end()) {
            for (const auto &key : *it) {
                if (!doc.contains(key.get<std::string>())) {
                    throw ConfigError(join(path, key.get<std::string>()), "missing field");
                }
            }
        }
        for (const auto &[key, value] : doc.items()) {
            if (props != schema.end() && props->contains(key)) {
                validate_schema(value, (*props)[key], join(path, key));
            } else if (schema.value("additionalProperties", true) == false) {
                throw ConfigError(join(path, key), "unknown key");
            }
        }
    }
}

ExperimentConfig resolve_config(const json &user) {
    if (!user.is_object()) {
        throw ConfigError("<root>", "expected object");
    }
    json doc = paper_preset();
    doc.merge_patch(user);
    validate_schema(doc, config_schema());

    ExperimentConfig cfg;
    if (doc.contains("model_id")) {
        cfg.model_id = doc["model_id"].get<std::string>();
    }
    cfg.circuit.qubits = get_as<std::size_t>(doc, "circuit", "qubits");
    cfg.circuit.layers = get_as<std::size_t>(doc, "circuit", "layers");
    cfg.circuit.encoding = get_as<std::string>(doc, "circuit", "encoding");

    try {
        cfg.observable = observable_from_json(doc["observable"], "observable");
    } catch (const std::runtime_error &e) {
        throw ConfigError("observable", e.what());
    }
    for (std::size_t i = 0; i < cfg.observable.terms.size(); ++i) {
        if (cfg.observable.terms[i].min_qubits() > cfg.circuit.qubits) {
            throw ConfigError("observable[" + std::to_string(i) + "].pauli",
                              "acts on more qubits than circuit.qubits");
        }
    }

    auto &t = cfg.train;
    t.lambda = get_as<double>(doc, "train", "lambda");
    t.learning_rate = get_as<double>(doc, "train", "learning_rate");
    t.epochs = get_as<std::size_t>(doc, "train", "epochs");
    t.restarts = get_as<std::size_t>(doc, "train", "restarts");
    t.seed = get_as<std::uint64_t>(doc, "train", "seed");
    t.loss = loss_kind_from_string(get_as<std::string>(doc, "train", "loss"));
    const auto reg = get_as<std::string>(doc, "train", "regularizer");
    const bool fixed = cfg.circuit.encoding == "fixed";
    if (reg == "auto") {
        t.regularizer = fixed ? RegularizerKind::angle_norm : RegularizerKind::encoding_norm;
    } else {
        t.regularizer = regularizer_kind_from_string(reg);
    }
    if (!fixed && t.regularizer == RegularizerKind::angle_norm) {
        throw ConfigError("train.regularizer",
                          "angle_norm applies to the fixed encoding only");
    }

    cfg.data.n_train = get_as<std::size_t>(doc, "data", "n_train");
    cfg.data.n_test = get_as<std::size_t>(doc, "data", "n_test");
    cfg.data.seed = get_as<std::uint64_t>(doc, "data", "seed");
    cfg.data.test_seed = get_as<std::uint64_t>(doc, "data", "test_seed");

    auto &s = cfg.sweep;
    s.lambda_grid = get_as<std::vector<double>>(doc, "sweep", "lambda_grid");
    s.eps_grid = get_as<std::vector<double>>(doc, "sweep", "eps_grid");
    s.noise_samples = get_as<std::size_t>(doc, "sweep", "noise_samples");
    s.noise_seed = get_as<std::uint64_t>(doc, "sweep", "noise_seed");
    s.worst_case_mode =
        worst_case_mode_from_string(get_as<std::string>(doc, "sweep", "worst_case_mode"));
    s.robustness_test_points = get_as<std::size_t>(doc, "sweep", "robustness_test_points");
    s.models = get_as<std::vector<std::string>>(doc, "sweep", "models");

    cfg.output_dir = doc["output_dir"].get<std::string>();
    cfg.hash = fnv1a_hex(doc.dump());
    cfg.resolved = std::move(doc);
    return cfg;
}

ExperimentConfig load_config(const std::optional<std::string> &path) {
    if (!path) {
        return resolve_config(json::object());
    }
    json user;
    try {
        user = read_json_file(*path);
    } catch (const std::runtime_error &e) {
        throw ConfigError(*path, e.what());
    }
    return resolve_config(user);
}

Circuit build_circuit(const CircuitSpec &spec) {
    if (spec.encoding == "fixed") {
        return build_fixed_circuit({spec.qubits, spec.layers, 2});
    }
    return build_paper_circuit(spec.qubits, spec.layers, 2);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace lipsqml::cli
