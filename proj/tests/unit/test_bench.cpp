#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <lipsqml/bounds.hpp>
#include <lipsqml/data.hpp>
#include <lipsqml/sweep.hpp>

#include "dense_oracle.hpp"

using namespace lipsqml;

namespace {

const Observable kZZZ = Observable::z_string(3);

struct Fixture {
    Circuit circuit = build_paper_circuit();
    ModelParams params;
    Dataset test = generate_circle_dataset(300, 21);

    Fixture() {
        std::mt19937_64 rng(99);
        params = oracle::random_params(circuit, rng, 0.8);
    }
};

/// Dataset labelled by the model itself.
Dataset self_labelled(const Circuit &c, const ModelParams &p, std::size_t n) {
    const auto raw = generate_circle_dataset(n, 5);
    Dataset out(2);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        out.add(raw.point(k), predict(c, p, rescale_to_angle_domain(raw.point(k)), kZZZ));
    }
    return out;
}

} // namespace

TEST_CASE("circle labels") {
    const std::vector<double> origin{0.0, 0.0}, corner{1.0, 1.0};
    CHECK(circle_label(origin) == 1);
    CHECK(circle_label(corner) == -1);
    const double r = kCircleRadius;
    const std::vector<double> boundary{r, 0.0};
    CHECK(circle_label(boundary) == -1);
    CHECK(kCircleRadius == doctest::Approx(0.7978845608));
}

TEST_CASE("generate_circle_dataset is deterministic and well formed") {
    const auto a = generate_circle_dataset(500, 7);
    const auto b = generate_circle_dataset(500, 7);
    const auto c = generate_circle_dataset(500, 8);
    REQUIRE(a.size() == 500);
    CHECK(a.seed() == 7);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.point(k)[0] == b.point(k)[0]);
        CHECK(a.point(k)[1] == b.point(k)[1]);
        CHECK(a.label(k) == circle_label(a.point(k)));
        for (double v : a.point(k)) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
        differs = differs || a.point(k)[0] != c.point(k)[0];
    }
    CHECK(differs);
    CHECK_THROWS_AS(generate_circle_dataset(0, 1), std::invalid_argument);
}

TEST_CASE("smaller datasets are prefixes of larger ones with the same seed") {
    const auto small = generate_circle_dataset(50, 3);
    const auto large = generate_circle_dataset(200, 3);
    for (std::size_t k = 0; k < small.size(); ++k) {
        CHECK(small.point(k)[0] == large.point(k)[0]);
        CHECK(small.point(k)[1] == large.point(k)[1]);
    }
}

TEST_CASE("class balance of one million points") {
    const auto data = generate_circle_dataset(1'000'000, 2024);
    std::size_t positive = 0;
    for (int y : data.labels()) {
        positive += y == 1 ? 1 : 0;
    }
    CHECK(std::abs(static_cast<double>(positive) / 1e6 - 0.5) < 0.002);
}

TEST_CASE("rescale_to_angle_domain") {
    const std::vector<double> a{0.0, 0.0}, b{1.0, -1.0}, c{0.5, 0.0}, d{1.5, 0.0};
    CHECK(rescale_to_angle_domain(a) == std::vector<double>{0.0, 0.0});
    CHECK(rescale_to_angle_domain(b) == std::vector<double>{std::numbers::pi, -std::numbers::pi});
    CHECK(rescale_to_angle_domain(c) == std::vector<double>{std::numbers::pi / 2, 0.0});
    bool outside = false;
    rescale_to_angle_domain(b, &outside);
    CHECK_FALSE(outside);
    const auto big = rescale_to_angle_domain(d, &outside);
    CHECK(outside);
    CHECK(big[0] == 1.5 * std::numbers::pi);
}

TEST_CASE("NoiseBatch draws are reproducible and in the unit cube") {
    const NoiseBatch a(10, 20, 2, 4);
    const NoiseBatch b(10, 20, 2, 4);
    for (std::size_t p = 0; p < 10; ++p) {
        for (std::size_t s = 0; s < 20; ++s) {
            for (std::size_t i = 0; i < 2; ++i) {
                CHECK(a.draw(p, s)[i] == b.draw(p, s)[i]);
                CHECK(std::abs(a.draw(p, s)[i]) <= 1.0);
            }
        }
    }
    CHECK_THROWS_AS(NoiseBatch(1, 0, 2, 0), std::invalid_argument);
}

TEST_CASE("accuracy examples") {
    const auto c = build_paper_circuit();
    const auto zero = c.default_params();
    const auto data = generate_circle_dataset(20000, 6);
    std::size_t positive = 0;
    for (int y : data.labels()) {
        positive += y == 1 ? 1 : 0;
    }
    // f == +1 everywhere, so accuracy is exactly the positive fraction.
    CHECK(accuracy(c, zero, kZZZ, data) == static_cast<double>(positive) / 20000.0);
    CHECK(std::abs(accuracy(c, zero, kZZZ, data) - 0.5) < 0.015);

    Fixture f;
    CHECK(accuracy(f.circuit, f.params, kZZZ, self_labelled(f.circuit, f.params, 200)) == 1.0);
    CHECK_THROWS_AS(accuracy(c, zero, kZZZ, Dataset(2)), std::invalid_argument);
}

TEST_CASE("accuracy does not depend on the thread count") {
    Fixture f;
    CHECK(accuracy(f.circuit, f.params, kZZZ, f.test, 1) ==
          accuracy(f.circuit, f.params, kZZZ, f.test, 4));
}

TEST_CASE("worst-case accuracy at eps = 0 equals clean accuracy") {
    Fixture f;
    const double clean = accuracy(f.circuit, f.params, kZZZ, f.test);
    for (auto mode : {WorstCaseMode::per_point, WorstCaseMode::per_dataset}) {
        CHECK(worst_case_accuracy(f.circuit, f.params, kZZZ, f.test, 0.0, 50, 1, mode) == clean);
    }
}

TEST_CASE("worst-case accuracy never exceeds clean accuracy and the certificate holds") {
    Fixture f;
    const double clean = accuracy(f.circuit, f.params, kZZZ, f.test);
    const double l_raw = std::numbers::pi * lipschitz_tight(f.circuit, f.params, kZZZ);
    const NoiseBatch noise(f.test.size(), 50, 2, 3);
    std::size_t certified_total = 0;
    for (double eps : {0.001, 0.01, 0.05, 0.1, 0.2}) {
        for (auto mode : {WorstCaseMode::per_point, WorstCaseMode::per_dataset}) {
            const auto out =
                worst_case_evaluate(f.circuit, f.params, kZZZ, f.test, noise, eps, mode, l_raw);
            CHECK(out.accuracy <= clean);
            CHECK(out.certificate_violations == 0);
            certified_total += out.certified_points;
        }
    }
    CHECK(certified_total > 0);
}

TEST_CASE("per-point worst case is at most the per-dataset worst case") {
    Fixture f;
    const NoiseBatch noise(f.test.size(), 40, 2, 8);
    for (double eps : {0.02, 0.1}) {
        const auto pp = worst_case_evaluate(f.circuit, f.params, kZZZ, f.test, noise, eps,
                                            WorstCaseMode::per_point, 0.0);
        const auto pd = worst_case_evaluate(f.circuit, f.params, kZZZ, f.test, noise, eps,
                                            WorstCaseMode::per_dataset, 0.0);
        CHECK(pp.accuracy <= pd.accuracy);
    }
}

TEST_CASE("an invalid Lipschitz constant is caught by the certificate bookkeeping") {
    Fixture f;
    const NoiseBatch noise(f.test.size(), 50, 2, 3);
    // With L = 0 every point with f != 0 is "certified", so flips surface as violations.
    const auto out = worst_case_evaluate(f.circuit, f.params, kZZZ, f.test, noise, 0.2,
                                         WorstCaseMode::per_point, 0.0);
    CHECK(out.certificate_violations > 0);
}

TEST_CASE("worst-case evaluation is deterministic across thread counts") {
    Fixture f;
    for (auto mode : {WorstCaseMode::per_point, WorstCaseMode::per_dataset}) {
        const double a = worst_case_accuracy(f.circuit, f.params, kZZZ, f.test, 0.1, 30, 2, mode, 1);
        const double b = worst_case_accuracy(f.circuit, f.params, kZZZ, f.test, 0.1, 30, 2, mode, 3);
        CHECK(a == b);
    }
}

TEST_CASE("default grids") {
    const auto eps = default_eps_grid();
    REQUIRE(eps.size() == 11);
    CHECK(eps.front() == 0.0);
    CHECK(eps[1] == 0.02);
    CHECK(eps[3] == 0.06);
    CHECK(eps.back() == 0.2);
    const auto lam = default_lambda_grid();
    REQUIRE(lam.size() == 11);
    CHECK(lam[3] == 0.15);
    CHECK(lam[7] == 0.35);
    CHECK(lam.back() == 0.5);
}

TEST_CASE("robustness_sweep shape, ordering and eps = 0 consistency") {
    Fixture f;
    TrainedModel a{"b-model", f.circuit, f.params, kZZZ, 0.0, 0.9, 0};
    TrainedModel b{"a-model", f.circuit, f.circuit.default_params(), kZZZ, 0.5, 0.5, 0};
    RobustnessOptions opts;
    opts.eps_grid = {0.0, 0.1, 0.05};
    opts.samples = 20;
    const auto res = robustness_sweep({a, b}, f.test, opts);
    CHECK(res.axis == "eps_bar");
    REQUIRE(res.records.size() == 6);
    CHECK(res.records[0].eps_bar == 0.0);
    CHECK(res.records[0].model_id == "a-model");
    CHECK(res.records[1].model_id == "b-model");
    CHECK(res.records[2].eps_bar == 0.05);
    CHECK(res.records[5].eps_bar == 0.1);
    for (const auto &r : res.records) {
        CHECK(r.worst_case_acc <= r.test_acc);
        if (r.eps_bar == 0.0) {
            CHECK(r.worst_case_acc == r.test_acc);
        }
        CHECK(r.lipschitz_tight <= r.lipschitz_simple);
    }
    CHECK(res.records[1].train_acc == 0.9);
    CHECK(res.records[1].test_acc == accuracy(f.circuit, f.params, kZZZ, f.test));
}

TEST_CASE("generalization_sweep trains one model per lambda") {
    const auto c = build_paper_circuit(2, 1, 2);
    const auto train = generate_circle_dataset(30, 1);
    const auto test = generate_circle_dataset(100, 2);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.restarts = 2;
    std::size_t calls = 0;
    const auto sweep = generalization_sweep({0.0, 0.3}, c, Observable::z_string(2), cfg, train,
                                            test, "tiny", 2, [&](const SweepRecord &) { ++calls; });
    CHECK(calls == 2);
    REQUIRE(sweep.result.records.size() == 2);
    REQUIRE(sweep.models.size() == 2);
    REQUIRE(sweep.trainings.size() == 2);
    CHECK(sweep.result.axis == "lambda");
    CHECK(sweep.models[1].id == "tiny-lambda-0.3");
    CHECK(sweep.result.records[1].lambda == 0.3);
    CHECK(sweep.result.records[1].lipschitz_tight == sweep.trainings[1].lipschitz_bound);
    const auto serial = generalization_sweep({0.0, 0.3}, c, Observable::z_string(2), cfg, train,
                                             test, "tiny", 1);
    CHECK(serial.result.records[1].lipschitz_tight == sweep.result.records[1].lipschitz_tight);
    CHECK(serial.result.records[0].test_acc == sweep.result.records[0].test_acc);
    CHECK_THROWS_AS(generalization_sweep({}, c, Observable::z_string(2), cfg, train, test, "x"),
                    std::invalid_argument);
}

TEST_CASE("fixed-encoding sweep keeps the Lipschitz bound constant") {
    const FixedEncodingSpec spec{2, 2, 2};
    const auto c = build_fixed_circuit(spec);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.restarts = 2;
    cfg.regularizer = RegularizerKind::angle_norm;
    const auto sweep =
        generalization_sweep({0.0, 0.25, 0.5}, c, Observable::z_string(2), cfg,
                             generate_circle_dataset(30, 1), generate_circle_dataset(50, 2), "fx");
    for (const auto &r : sweep.result.records) {
        CHECK(r.lipschitz_tight == sweep.result.records.front().lipschitz_tight);
    }
}

TEST_CASE("sweep CSV and gnuplot output") {
    SweepResult res{"eps_bar",
                    {{"m1", 0.5, 0.0, 0.9, 0.8, 0.8, 1.25, 2.5, 3},
                     {"m2", 0.0, 0.0, 1.0, 0.75, 0.75, 4.0, 5.0, 3},
                     {"m1", 0.5, 0.1, 0.9, 0.8, 0.5, 1.25, 2.5, 3}}};
    std::ostringstream csv;
    write_sweep_csv(csv, res);
    CHECK(csv.str() == "model_id,lambda,eps_bar,train_acc,test_acc,worst_case_acc,"
                       "lipschitz_tight,lipschitz_simple,seed\n"
                       "m1,0.5,0,0.9,0.8,0.8,1.25,2.5,3\n"
                       "m2,0,0,1,0.75,0.75,4,5,3\n"
                       "m1,0.5,0.1,0.9,0.8,0.5,1.25,2.5,3\n");
    std::ostringstream dat;
    write_sweep_gnuplot(dat, res);
    CHECK(dat.str() ==
          "# model m1\n# eps_bar train_acc test_acc worst_case_acc lipschitz_tight "
          "lipschitz_simple\n0 0.9 0.8 0.8 1.25 2.5\n0.1 0.9 0.8 0.5 1.25 2.5\n\n\n"
          "# model m2\n# eps_bar train_acc test_acc worst_case_acc lipschitz_tight "
          "lipschitz_simple\n0 1 0.75 0.75 4 5\n");
}

TEST_CASE("format_double round-trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(std::stod(format_double(std::numbers::pi)) == std::numbers::pi);
}

TEST_CASE("spearman_correlation") {
    CHECK(spearman_correlation({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman_correlation({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // Ranks (1, 2, 3, 4) vs (1, 3, 2, 4): 1 - 6 * 2 / (4 * 15) = 0.8.
    CHECK(spearman_correlation({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8));
    // Ties get average ranks: (1.5, 1.5, 3) vs (1, 2, 3).
    CHECK(spearman_correlation({5, 5, 7}, {1, 2, 3}) == doctest::Approx(std::sqrt(3.0) / 2.0));
    CHECK(std::isnan(spearman_correlation({1, 1, 1}, {1, 2, 3})));
    CHECK_THROWS_AS(spearman_correlation({1}, {1}), std::invalid_argument);
}
