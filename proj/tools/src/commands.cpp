#include "lipsqml_cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include <lipsqml/parallel.hpp>

namespace lipsqml::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char *kModelFormat = "lipsqml-model";
constexpr int kModelVersion = 1;

std::string dump_json(const json &j) { return j.dump(2) + "\n"; }

void ensure_parent(const std::string &path) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
        if (ec) {
            throw RuntimeFailure(parent.string() + ": cannot create directory: " + ec.message());
        }
    }
}

std::string history_path(const std::string &model_path) {
    fs::path p(model_path);
    if (p.extension() == ".json") {
        p.replace_extension();
    }
    return p.string() + ".history.csv";
}

template <class T> T require(const json &doc, const std::string &path, const char *key) {
    const auto it = doc.find(key);
    if (it == doc.end()) {
        throw RuntimeFailure(path + "." + key + ": missing field");
    }
    try {
        return it->get<T>();
    } catch (const json::exception &) {
        throw RuntimeFailure(path + "." + key + ": wrong type");
    }
}

const json &section(const json &doc, const std::string &file, const char *key) {
    if (!doc.contains(key) || !doc[key].is_object()) {
        throw RuntimeFailure(file + ": missing object '" + key + "'");
    }
    return doc[key];
}

std::string sweep_file(const std::string &dir, const std::string &mode, const char *ext) {
    return (fs::path(dir) / (mode + "_sweep" + ext)).string();
}

void write_sweep_outputs(const std::string &dir, const std::string &mode,
                         const ExperimentConfig &cfg, const SweepResult &result) {
    std::ostringstream csv;
    write_sweep_csv(csv, result);
    write_text_file(sweep_file(dir, mode, ".csv"), csv.str());

    std::ostringstream dat;
    write_sweep_gnuplot(dat, result);
    write_text_file(sweep_file(dir, mode, ".dat"), dat.str());

    json doc = sweep_result_to_json(result);
    doc["mode"] = mode;
    doc["config_hash"] = cfg.hash;
    write_text_file(sweep_file(dir, mode, ".json"), dump_json(doc));
}

void sweep_lambda(const ExperimentConfig &cfg, const std::string &out_dir, std::ostream &log) {
    const Circuit circuit = build_circuit(cfg.circuit);
    const Dataset train = generate_circle_dataset(cfg.data.n_train, cfg.data.seed);
    const Dataset test = generate_circle_dataset(cfg.data.n_test, cfg.data.test_seed);
    const std::size_t total = cfg.sweep.lambda_grid.size();
    std::size_t done = 0;
    log << "lambda sweep: " << total << " value(s), " << cfg.circuit.encoding << " encoding\n";

    const auto id_prefix = cfg.model_id.value_or(cfg.circuit.encoding);
    auto sweep = generalization_sweep(
        cfg.sweep.lambda_grid, circuit, cfg.observable, cfg.train, train, test, id_prefix,
        threads_from_env(), [&](const SweepRecord &r) {
            ++done;
            log << "  [" << done << "/" << total << "] lambda=" << format_double(r.lambda)
                << " L=" << format_double(r.lipschitz_tight)
                << " test_acc=" << format_double(r.test_acc) << "\n";
        });

    const auto models_dir = fs::path(out_dir) / "models";
    fs::create_directories(models_dir);
    for (std::size_t i = 0; i < sweep.models.size(); ++i) {
        const auto &m = sweep.models[i];
        const auto &r = sweep.result.records[i];
        const json doc = model_document(cfg, m.id, circuit, m.params, sweep.trainings[i],
                                        m.lambda, r.train_acc, r.test_acc);
        write_text_file((models_dir / (m.id + ".json")).string(), dump_json(doc));
    }
    write_sweep_outputs(out_dir, "lambda", cfg, sweep.result);
}

void sweep_robustness(const ExperimentConfig &cfg, const std::string &out_dir,
                      std::ostream &log) {
    if (cfg.sweep.models.empty()) {
        throw RuntimeFailure("robustness sweep needs trained models in sweep.models");
    }
    std::vector<std::string> missing;
    for (const auto &path : cfg.sweep.models) {
        if (!fs::is_regular_file(path)) {
            missing.push_back(path);
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto &p : missing) {
            list += "\n  " + p;
        }
        throw RuntimeFailure("missing model file(s):" + list);
    }
    std::vector<TrainedModel> models;
    for (const auto &path : cfg.sweep.models) {
        models.push_back(load_model(path).model);
    }
    const Dataset test =
        generate_circle_dataset(cfg.sweep.robustness_test_points, cfg.data.test_seed);
    RobustnessOptions options;
    options.eps_grid = cfg.sweep.eps_grid;
    options.samples = cfg.sweep.noise_samples;
    options.noise_seed = cfg.sweep.noise_seed;
    options.mode = cfg.sweep.worst_case_mode;
    options.threads = threads_from_env();
    log << "robustness sweep: " << models.size() << " model(s) x " << options.eps_grid.size()
        << " eps value(s), " << options.samples << " noise samples, "
        << to_string(options.mode) << "\n";
    const auto result = robustness_sweep(models, test, options);
    write_sweep_outputs(out_dir, "robustness", cfg, result);
    log << "robustness sweep: " << result.records.size() << " record(s)\n";
}

} // namespace

std::size_t threads_from_env() {
    const char *raw = std::getenv("LIPSQML_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return resolve_threads(0);
    }
    const std::string s(raw);
    std::size_t pos = 0;
    long long v = -1;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception &) {
        pos = 0;
    }
    if (pos != s.size() || v < 0) {
        throw ConfigError("LIPSQML_THREADS", "expected a non-negative integer, got '" + s + "'");
    }
    return resolve_threads(static_cast<std::size_t>(v));
}

std::string default_model_id(const ExperimentConfig &cfg, double lambda) {
    if (cfg.model_id) {
        return *cfg.model_id;
    }
    return cfg.circuit.encoding + "-lambda-" + format_double(lambda);
}

json model_document(const ExperimentConfig &cfg, const std::string &model_id,
                    const Circuit &circuit, const ModelParams &params, const TrainResult &trained,
                    double lambda, double train_acc, double test_acc) {
    json training = train_result_summary_to_json(trained);
    training["lambda"] = lambda;
    training["learning_rate"] = cfg.train.learning_rate;
    training["epochs"] = cfg.train.epochs;
    training["restarts"] = cfg.train.restarts;
    training["seed"] = cfg.train.seed;
    training["loss"] = to_string(cfg.train.loss);
    training["regularizer"] = to_string(cfg.train.regularizer);

    const auto report = make_bound_report(circuit, params, cfg.observable);
    return {
        {"format", kModelFormat},
        {"version", kModelVersion},
        {"model_id", model_id},
        {"encoding", cfg.circuit.encoding},
        {"circuit", circuit_to_json(circuit, params)},
        {"observable", observable_to_json(cfg.observable)},
        {"training", training},
        {"data",
         {{"n_train", cfg.data.n_train},
          {"n_test", cfg.data.n_test},
          {"seed", cfg.data.seed},
          {"test_seed", cfg.data.test_seed}}},
        {"metadata",
         {{"train_acc", train_acc},
          {"test_acc", test_acc},
          {"lipschitz_tight", report.lipschitz_tight},
          {"lipschitz_simple", report.lipschitz_simple},
          {"lipschitz_tight_raw", report.lipschitz_tight_raw()},
          {"domain_convention", to_string(report.domain_convention)},
          {"config_hash", cfg.hash}}},
        {"config", cfg.resolved},
    };
}

LoadedModel load_model(const std::string &path) {
    json doc;
    try {
        doc = read_json_file(path);
    } catch (const std::runtime_error &e) {
        throw RuntimeFailure(e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kModelFormat) {
        throw RuntimeFailure(path + ": not a lipsqml model file");
    }
    if (doc.value("version", 0) != kModelVersion) {
        throw RuntimeFailure(path + ": unsupported model version");
    }
    LoadedModel out;
    try {
        auto [circuit, params] = circuit_from_json(section(doc, path, "circuit"), path + ":circuit");
        out.model.circuit = std::move(circuit);
        out.model.params = std::move(params);
        out.model.obs = observable_from_json(doc.at("observable"), path + ":observable");
        for (const auto &term : out.model.obs.terms) {
            check_word_fits(term, out.model.circuit.n_qubits());
        }
    } catch (const std::exception &e) {
        throw RuntimeFailure(std::string(e.what()));
    }
    const auto where = path + ":";
    out.model.id = require<std::string>(doc, where, "model_id");
    out.encoding = require<std::string>(doc, where, "encoding");
    const auto &training = section(doc, path, "training");
    out.model.lambda = require<double>(training, where + "training", "lambda");
    out.model.seed = require<std::uint64_t>(training, where + "training", "seed");
    const auto &meta = section(doc, path, "metadata");
    out.model.train_accuracy = require<double>(meta, where + "metadata", "train_acc");
    out.test_accuracy = require<double>(meta, where + "metadata", "test_acc");
    const auto &data = section(doc, path, "data");
    out.data.n_train = require<std::size_t>(data, where + "data", "n_train");
    out.data.n_test = require<std::size_t>(data, where + "data", "n_test");
    out.data.seed = require<std::uint64_t>(data, where + "data", "seed");
    out.data.test_seed = require<std::uint64_t>(data, where + "data", "test_seed");
    out.document = std::move(doc);
    return out;
}

void cmd_generate_data(std::size_t n, std::uint64_t seed, const std::string &out_path) {
    if (n < 1) {
        throw ConfigError("--n", "must be at least 1");
    }
    const Dataset data = generate_circle_dataset(n, seed);
    std::ostringstream csv;
    write_dataset_csv(csv, data);
    ensure_parent(out_path);
    write_text_file(out_path, csv.str());
}

void cmd_train(const ExperimentConfig &cfg, const std::string &out_path, std::ostream &log) {
    const Circuit circuit = build_circuit(cfg.circuit);
    const Dataset train_data = generate_circle_dataset(cfg.data.n_train, cfg.data.seed);
    const Dataset test_data = generate_circle_dataset(cfg.data.n_test, cfg.data.test_seed);
    TrainConfig tc = cfg.train;
    tc.threads = threads_from_env();

    log << "training " << cfg.circuit.encoding << " model: " << tc.restarts << " restart(s) x "
        << tc.epochs << " epoch(s), lambda=" << format_double(tc.lambda) << "\n";
    const TrainResult result = train(circuit, cfg.observable, train_data, tc);
    const double train_acc = accuracy(circuit, result.best_params, cfg.observable, train_data);
    const double test_acc = accuracy(circuit, result.best_params, cfg.observable, test_data);
    log << "best cost " << format_double(result.best_cost) << " (restart " << result.best_restart
        << ", epoch " << result.best_epoch << "), train_acc " << format_double(train_acc)
        << ", test_acc " << format_double(test_acc) << ", L "
        << format_double(result.lipschitz_bound) << "\n";

    const json doc = model_document(cfg, default_model_id(cfg, tc.lambda), circuit,
                                    result.best_params, result, tc.lambda, train_acc, test_acc);
    ensure_parent(out_path);
    write_text_file(out_path, dump_json(doc));
    std::ostringstream hist;
    write_history_csv(hist, result);
    write_text_file(history_path(out_path), hist.str());
}

json cmd_bound(const std::string &model_path, const BoundOptions &options) {
    if (options.n && !(*options.n >= 1.0)) {
        throw ConfigError("--n", "must be at least 1");
    }
    if (!(options.delta > 0.0 && options.delta < 1.0)) {
        throw ConfigError("--delta", "must lie in (0, 1)");
    }
    if (options.gamma && !(*options.gamma > 0.0)) {
        throw ConfigError("--gamma", "must be positive");
    }
    const LoadedModel loaded = load_model(model_path);
    const auto &m = loaded.model;
    const auto report = make_bound_report(m.circuit, m.params, m.obs);
    const double n = options.n.value_or(static_cast<double>(loaded.data.n_train));
    const std::size_t d = m.circuit.data_dim();

    GenBoundInputs inputs = squared_loss_defaults(report.lipschitz_tight, d, n, options.delta);
    inputs.gamma = options.gamma;
    const double gamma = options.gamma.value_or(auto_gamma(n, d));

    json out = bound_report_to_json(report);
    out["model_id"] = m.id;
    out["generalization"] = {
        {"value", generalization_bound(inputs)},
        {"lipschitz", inputs.lipschitz},
        {"lipschitz_domain", to_string(report.domain_convention)},
        {"loss", "squared"},
        {"loss_lipschitz", inputs.loss_lipschitz},
        {"loss_sup", inputs.loss_sup},
        {"radius", inputs.radius},
        {"data_dim", d},
        {"n", n},
        {"delta", inputs.delta},
        {"gamma", gamma},
        {"gamma_mode", options.gamma ? "fixed" : "auto"},
        {"covering_number", covering_number_upper(inputs.radius, gamma, d)},
    };
    return out;
}

void cmd_sweep(const std::string &mode, const ExperimentConfig &cfg, const std::string &out_dir,
               std::ostream &log) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw RuntimeFailure(out_dir + ": cannot create directory: " + ec.message());
    }
    if (mode == "lambda") {
        sweep_lambda(cfg, out_dir, log);
    } else if (mode == "robustness") {
        sweep_robustness(cfg, out_dir, log);
    } else {
        throw ConfigError("--mode", "must be 'robustness' or 'lambda'");
    }
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Variational quantum classifiers with Lipschitz-regularized encodings"};
    app.name(args.empty() ? "lipsqml" : fs::path(args.front()).filename().string());
    app.require_subcommand(1);

    auto *gen = app.add_subcommand("generate-data", "Write a circle classification dataset as CSV");
    long long gen_n = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--n", gen_n, "Number of points")->required();
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output CSV path")->required();

    auto *trn = app.add_subcommand("train", "Train one model and write model JSON + history CSV");
    std::optional<std::string> trn_config;
    bool trn_paper = false;
    std::string trn_out;
    trn->add_option("--config", trn_config, "Experiment config JSON (merged over the preset)");
    trn->add_flag("--paper", trn_paper, "Use the paper preset");
    trn->add_option("--out", trn_out, "Model JSON path (default <output_dir>/model.json)");

    auto *bnd = app.add_subcommand("bound", "Print Lipschitz and generalization bounds as JSON");
    std::string bnd_model;
    BoundOptions bnd_opts;
    bnd->add_option("--model", bnd_model, "Model JSON written by train")->required();
    bnd->add_option("--n", bnd_opts.n, "Sample count (default: the model's n_train)");
    bnd->add_option("--delta", bnd_opts.delta, "Confidence parameter")->capture_default_str();
    bnd->add_option("--gamma", bnd_opts.gamma, "Covering scale (default n^(-1/(2d+2)))");

    auto *swp = app.add_subcommand("sweep", "Run a robustness or lambda sweep");
    std::string swp_mode;
    std::optional<std::string> swp_config;
    bool swp_paper = false;
    std::string swp_out;
    swp->add_option("--mode", swp_mode, "robustness | lambda")
        ->required()
        ->check(CLI::IsMember({"robustness", "lambda"}));
    swp->add_option("--config", swp_config, "Experiment config JSON (merged over the preset)");
    swp->add_flag("--paper", swp_paper, "Use the paper preset");
    swp->add_option("--out", swp_out, "Output directory (default <output_dir>)");

    try {
        std::vector<std::string> rest(args.rbegin(), args.rend());
        if (!rest.empty()) {
            rest.pop_back();
        }
        app.parse(rest);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            if (gen_n < 1) {
                throw ConfigError("--n", "must be at least 1");
            }
            cmd_generate_data(static_cast<std::size_t>(gen_n), gen_seed, gen_out);
            err << "wrote " << gen_n << " point(s) to " << gen_out << "\n";
        } else if (trn->parsed()) {
            if (!trn_config && !trn_paper) {
                throw ConfigError("--config", "train needs --config or --paper");
            }
            const auto cfg = load_config(trn_config);
            const auto path =
                trn_out.empty() ? (fs::path(cfg.output_dir) / "model.json").string() : trn_out;
            cmd_train(cfg, path, err);
            err << "wrote " << path << " and " << history_path(path) << "\n";
        } else if (bnd->parsed()) {
            out << cmd_bound(bnd_model, bnd_opts).dump(2) << "\n";
        } else if (swp->parsed()) {
            if (!swp_config && !swp_paper) {
                throw ConfigError("--config", "sweep needs --config or --paper");
            }
            const auto cfg = load_config(swp_config);
            const auto dir = swp_out.empty() ? cfg.output_dir : swp_out;
            cmd_sweep(swp_mode, cfg, dir, err);
            err << "wrote " << sweep_file(dir, swp_mode, ".{csv,json,dat}") << "\n";
        }
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace lipsqml::cli
