#include <doctest.h>

#include <lipsqml_cli/config.hpp>

using namespace lipsqml;
using namespace lipsqml::cli;

namespace {

std::string config_error_path(const json &user) {
    try {
        resolve_config(user);
    } catch (const ConfigError &e) {
        return e.path();
    }
    return "<accepted>";
}

} // namespace

TEST_CASE("paper preset resolves to the published setup") {
    const auto cfg = resolve_config(json::object());
    CHECK(cfg.circuit.qubits == 3);
    CHECK(cfg.circuit.layers == 3);
    CHECK(cfg.circuit.encoding == "trainable");
    REQUIRE(cfg.observable.terms.size() == 1);
    CHECK(cfg.observable.terms[0] == PauliWord::from_string("ZZZ"));
    CHECK(cfg.train.lambda == 0.0);
    CHECK(cfg.train.learning_rate == 0.1);
    CHECK(cfg.train.epochs == 200);
    CHECK(cfg.train.restarts == 9);
    CHECK(cfg.train.regularizer == RegularizerKind::encoding_norm);
    CHECK(cfg.data.n_train == 200);
    CHECK(cfg.data.n_test == 10000);
    CHECK(cfg.sweep.lambda_grid.size() == 11);
    CHECK(cfg.sweep.eps_grid.size() == 11);
    CHECK(cfg.sweep.eps_grid.back() == doctest::Approx(0.2));
    CHECK(cfg.sweep.noise_samples == 200);
    CHECK(cfg.sweep.worst_case_mode == WorstCaseMode::per_point);
    CHECK_FALSE(cfg.model_id.has_value());
    CHECK(cfg.hash.size() == 16);
    CHECK(load_config(std::nullopt).hash == cfg.hash);
    const auto c = build_circuit(cfg.circuit);
    CHECK(c.rotation_count() == 18);
    CHECK(c.cnot_count() == 9);
}

TEST_CASE("the preset satisfies the embedded schema") {
    CHECK_NOTHROW(validate_schema(paper_preset(), config_schema()));
    CHECK(config_schema()["additionalProperties"] == false);
}

TEST_CASE("user values merge over the preset") {
    const auto cfg = resolve_config({{"train", {{"lambda", 0.25}, {"epochs", 5}}},
                                     {"model_id", "m-1"}});
    CHECK(cfg.train.lambda == 0.25);
    CHECK(cfg.train.epochs == 5);
    CHECK(cfg.train.restarts == 9);
    CHECK(cfg.model_id == std::optional<std::string>("m-1"));
    CHECK(cfg.hash != resolve_config(json::object()).hash);
    // Same content, same hash.
    CHECK(cfg.hash == resolve_config({{"model_id", "m-1"},
                                      {"train", {{"epochs", 5}, {"lambda", 0.25}}}})
                          .hash);
}

TEST_CASE("fixed encoding picks the angle regularizer") {
    const auto cfg = resolve_config({{"circuit", {{"encoding", "fixed"}}}});
    CHECK(cfg.train.regularizer == RegularizerKind::angle_norm);
    CHECK(build_circuit(cfg.circuit).rotation_count() == 45);
}

TEST_CASE("schema violations name the offending key") {
    CHECK(config_error_path({{"train", {{"lamda", 0.1}}}}) == "train.lamda");
    CHECK(config_error_path({{"trian", json::object()}}) == "trian");
    CHECK(config_error_path({{"train", {{"lambda", -0.1}}}}) == "train.lambda");
    CHECK(config_error_path({{"train", {{"learning_rate", 0.0}}}}) == "train.learning_rate");
    CHECK(config_error_path({{"train", {{"epochs", "ten"}}}}) == "train.epochs");
    CHECK(config_error_path({{"train", {{"epochs", 1.5}}}}) == "train.epochs");
    CHECK(config_error_path({{"train", {{"loss", "hinge"}}}}) == "train.loss");
    CHECK(config_error_path({{"circuit", {{"encoding", "amplitude"}}}}) == "circuit.encoding");
    CHECK(config_error_path({{"circuit", {{"qubits", 1}}}}) == "circuit.qubits");
    CHECK(config_error_path({{"observable", json::array({{{"pauli", "ZQ"}}})}}) ==
          "observable[0].pauli");
    CHECK(config_error_path({{"observable", json::array()}}) == "observable");
    CHECK(config_error_path({{"observable", json::array({{{"pauli", "ZZZZ"}}})}}) ==
          "observable[0].pauli");
    CHECK(config_error_path({{"model_id", "bad id/"}}) == "model_id");
    CHECK(config_error_path({{"sweep", {{"worst_case_mode", "avg"}}}}) == "sweep.worst_case_mode");
    CHECK(config_error_path({{"sweep", {{"eps_grid", json::array({-0.1})}}}}) ==
          "sweep.eps_grid[0]");
    CHECK(config_error_path({{"train", {{"regularizer", "angle_norm"}}}}) == "train.regularizer");
    CHECK(config_error_path({{"train", {{"lambda", nullptr}}}}) == "train.lambda");
    CHECK(config_error_path(json::array()) == "<root>");
}

TEST_CASE("load_config reports unreadable files") {
    CHECK_THROWS_AS(load_config(std::string("/nonexistent/config.json")), ConfigError);
}

TEST_CASE("fnv1a_hex known values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
