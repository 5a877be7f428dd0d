#include "lipsqml/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lipsqml {

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &what) {
    throw std::runtime_error(path + ": " + what);
}

const json &field(const json &obj, const char *key, const std::string &path) {
    if (!obj.is_object()) {
        fail(path, "expected an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
        fail(path + "." + key, "missing field");
    }
    return *it;
}

double as_double(const json &v, const std::string &path) {
    if (!v.is_number()) {
        fail(path, "expected a number");
    }
    return v.get<double>();
}

std::size_t as_index(const json &v, const std::string &path) {
    if (!v.is_number_unsigned()) {
        fail(path, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

bool as_bool(const json &v, const std::string &path) {
    if (!v.is_boolean()) {
        fail(path, "expected a boolean");
    }
    return v.get<bool>();
}

std::string as_string(const json &v, const std::string &path) {
    if (!v.is_string()) {
        fail(path, "expected a string");
    }
    return v.get<std::string>();
}

const json &as_array(const json &v, const std::string &path) {
    if (!v.is_array()) {
        fail(path, "expected an array");
    }
    return v;
}

std::string at(const std::string &path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_double(const std::string &s, const std::string &where) {
    double v = 0.0;
    const auto *end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw std::runtime_error(where + ": cannot parse number '" + s + "'");
    }
    return v;
}

} // namespace

json observable_to_json(const Observable &obs) {
    const std::size_t n = std::max<std::size_t>(1, obs.min_qubits());
    json out = json::array();
    for (const auto &term : obs.terms) {
        out.push_back({{"pauli", term.to_string(n)}, {"coefficient", term.coefficient()}});
    }
    return out;
}

Observable observable_from_json(const json &j, const std::string &path) {
    as_array(j, path);
    if (j.empty()) {
        fail(path, "observable needs at least one term");
    }
    Observable obs;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto p = at(path, i);
        const auto word = as_string(field(j[i], "pauli", p), p + ".pauli");
        double coeff = 1.0;
        if (j[i].contains("coefficient")) {
            coeff = as_double(j[i]["coefficient"], p + ".coefficient");
        }
        try {
            obs.terms.push_back(PauliWord::from_string(word, coeff));
        } catch (const std::exception &e) {
            fail(p + ".pauli", e.what());
        }
    }
    return obs;
}

json circuit_to_json(const Circuit &circuit, const ModelParams &params) {
    circuit.check_params(params);
    json ops = json::array();
    std::size_t j = 0;
    for (const auto &op : circuit.ops()) {
        if (const auto *rot = std::get_if<TrainableRotation>(&op)) {
            json qubits = json::array();
            std::string gen;
            for (const auto &f : rot->generator.factors()) {
                qubits.push_back(f.qubit);
                gen.push_back(pauli_to_char(f.op));
            }
            const auto row = static_cast<Eigen::Index>(j);
            std::vector<double> w(circuit.data_dim());
            for (std::size_t k = 0; k < w.size(); ++k) {
                w[k] = params.W(row, static_cast<Eigen::Index>(k));
            }
            ops.push_back({{"kind", "rotation"},
                           {"qubits", qubits},
                           {"generator", gen},
                           {"scale", rot->scale},
                           {"w", w},
                           {"theta", params.omega(row)},
                           {"trainable_mask",
                            {{"w", rot->w_trainable}, {"theta", rot->theta_trainable}}}});
            ++j;
        } else {
            const auto &g = std::get<FixedGate>(op);
            ops.push_back({{"kind", "cnot"}, {"qubits", {g.control, g.target}}});
        }
    }
    return {{"n_qubits", circuit.n_qubits()}, {"data_dim", circuit.data_dim()}, {"ops", ops}};
}

std::pair<Circuit, ModelParams> circuit_from_json(const json &j, const std::string &path) {
    const auto n = as_index(field(j, "n_qubits", path), path + ".n_qubits");
    const auto d = as_index(field(j, "data_dim", path), path + ".data_dim");
    std::optional<Circuit> built;
    try {
        built.emplace(n, d);
    } catch (const std::exception &e) {
        fail(path, e.what());
    }
    Circuit &circuit = *built;
    const auto &ops = as_array(field(j, "ops", path), path + ".ops");
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto p = at(path + ".ops", i);
        const auto kind = as_string(field(ops[i], "kind", p), p + ".kind");
        const auto &qubits = as_array(field(ops[i], "qubits", p), p + ".qubits");
        std::vector<std::size_t> q(qubits.size());
        for (std::size_t k = 0; k < q.size(); ++k) {
            q[k] = as_index(qubits[k], at(p + ".qubits", k));
        }
        try {
            if (kind == "cnot") {
                if (q.size() != 2) {
                    fail(p + ".qubits", "cnot needs [control, target]");
                }
                circuit.add_cnot(q[0], q[1]);
            } else if (kind == "rotation") {
                const auto gen = as_string(field(ops[i], "generator", p), p + ".generator");
                if (gen.size() != q.size()) {
                    fail(p + ".generator", "length must match qubits");
                }
                std::vector<PauliFactor> factors;
                for (std::size_t k = 0; k < q.size(); ++k) {
                    factors.push_back({q[k], pauli_from_char(gen[k])});
                }
                TrainableRotation r;
                r.generator = PauliWord(std::move(factors));
                r.scale = as_double(field(ops[i], "scale", p), p + ".scale");
                const auto &w = as_array(field(ops[i], "w", p), p + ".w");
                if (w.size() != d) {
                    fail(p + ".w", "expected " + std::to_string(d) + " entries");
                }
                for (std::size_t k = 0; k < w.size(); ++k) {
                    r.w.push_back(as_double(w[k], at(p + ".w", k)));
                }
                r.theta = as_double(field(ops[i], "theta", p), p + ".theta");
                const auto &mask = field(ops[i], "trainable_mask", p);
                r.w_trainable = as_bool(field(mask, "w", p + ".trainable_mask"),
                                        p + ".trainable_mask.w");
                r.theta_trainable = as_bool(field(mask, "theta", p + ".trainable_mask"),
                                            p + ".trainable_mask.theta");
                circuit.add_rotation(std::move(r));
            } else {
                fail(p + ".kind", "unknown op kind '" + kind + "'");
            }
        } catch (const std::runtime_error &) {
            throw;
        } catch (const std::exception &e) {
            fail(p, e.what());
        }
    }
    ModelParams params = circuit.default_params();
    return {std::move(circuit), std::move(params)};
}

json bound_report_to_json(const BoundReport &r) {
    return {{"lipschitz_tight", r.lipschitz_tight},
            {"lipschitz_simple", r.lipschitz_simple},
            {"obs_norm", r.obs_norm},
            {"per_gate_terms", r.per_gate_terms},
            {"domain_convention", to_string(r.domain_convention)},
            {"raw_space_factor", r.raw_space_factor},
            {"lipschitz_tight_raw", r.lipschitz_tight_raw()},
            {"lipschitz_simple_raw", r.lipschitz_simple_raw()}};
}

json train_result_summary_to_json(const TrainResult &r) {
    return {{"best_cost", r.best_cost},
            {"best_restart", r.best_restart},
            {"best_epoch", r.best_epoch},
            {"lipschitz_bound", r.lipschitz_bound}};
}

json sweep_record_to_json(const SweepRecord &r) {
    return {{"model_id", r.model_id},
            {"lambda", r.lambda},
            {"eps_bar", r.eps_bar},
            {"train_acc", r.train_acc},
            {"test_acc", r.test_acc},
            {"worst_case_acc", r.worst_case_acc},
            {"lipschitz_tight", r.lipschitz_tight},
            {"lipschitz_simple", r.lipschitz_simple},
            {"seed", r.seed}};
}

json sweep_result_to_json(const SweepResult &result) {
    json records = json::array();
    for (const auto &r : result.records) {
        records.push_back(sweep_record_to_json(r));
    }
    return {{"axis", result.axis}, {"records", records}};
}

void write_dataset_csv(std::ostream &out, const Dataset &data) {
    for (std::size_t i = 0; i < data.dim(); ++i) {
        out << 'x' << i + 1 << ',';
    }
    out << "label\n";
    for (std::size_t k = 0; k < data.size(); ++k) {
        for (double v : data.point(k)) {
            out << format_double(v) << ',';
        }
        out << data.label(k) << '\n';
    }
}

Dataset read_dataset_csv(std::istream &in, const std::string &source) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(source + ": empty file");
    }
    const auto header = split_csv(line);
    if (header.size() < 2 || header.back() != "label") {
        throw std::runtime_error(source + ": header must be x1,...,xd,label");
    }
    const std::size_t d = header.size() - 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (header[i] != "x" + std::to_string(i + 1)) {
            throw std::runtime_error(source + ": header must be x1,...,xd,label");
        }
    }
    Dataset data(d);
    std::vector<double> x(d);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        const auto where = source + ":" + std::to_string(row);
        const auto cells = split_csv(line);
        if (cells.size() != d + 1) {
            throw std::runtime_error(where + ": expected " + std::to_string(d + 1) + " columns");
        }
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = parse_double(cells[i], where);
        }
        const double label = parse_double(cells[d], where);
        if (label != 1.0 && label != -1.0) {
            throw std::runtime_error(where + ": label must be 1 or -1");
        }
        data.add(x, static_cast<int>(label));
    }
    return data;
}

void write_history_csv(std::ostream &out, const TrainResult &result) {
    out << "restart,epoch,cost\n";
    for (std::size_t r = 0; r < result.history.size(); ++r) {
        for (std::size_t e = 0; e < result.history[r].size(); ++e) {
            out << r << ',' << e << ',' << format_double(result.history[r][e]) << '\n';
        }
    }
}

void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(path + ": cannot open for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw std::runtime_error(path + ": write failed");
    }
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(path + ": cannot open for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::string &path) {
    const auto text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }
}

} // namespace lipsqml
