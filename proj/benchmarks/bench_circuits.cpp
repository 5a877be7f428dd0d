#include <random>

#include <benchmark/benchmark.h>

#include <lipsqml/bounds.hpp>
#include <lipsqml/grad.hpp>
#include <lipsqml/sweep.hpp>
#include <lipsqml/train.hpp>

using namespace lipsqml;

namespace {

ModelParams random_params(const Circuit &c, std::uint64_t seed) { return random_init(c, seed, 0); }

const std::vector<double> kPoint{0.4, -1.3};

void BM_Forward(benchmark::State &state) {
    const auto layers = static_cast<std::size_t>(state.range(0));
    const auto c = build_paper_circuit(3, layers, 2);
    const auto p = random_params(c, 1);
    const auto obs = Observable::z_string(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(c, p, kPoint, obs));
    }
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(3)->Arg(9);

void BM_ForwardQubits(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto c = build_paper_circuit(n, 3, 2);
    const auto p = random_params(c, 1);
    const auto obs = Observable::z_string(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(c, p, kPoint, obs));
    }
}
BENCHMARK(BM_ForwardQubits)->DenseRange(2, 12, 2);

void BM_Adjoint(benchmark::State &state) {
    const auto c = build_paper_circuit(3, static_cast<std::size_t>(state.range(0)), 2);
    const auto p = random_params(c, 2);
    const auto obs = Observable::z_string(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(angle_gradients_adjoint(c, p, kPoint, obs));
    }
}
BENCHMARK(BM_Adjoint)->Arg(1)->Arg(3)->Arg(9);

void BM_ParameterShift(benchmark::State &state) {
    const auto c = build_paper_circuit(3, static_cast<std::size_t>(state.range(0)), 2);
    const auto p = random_params(c, 2);
    const auto obs = Observable::z_string(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(angle_gradients_parameter_shift(c, p, kPoint, obs));
    }
}
BENCHMARK(BM_ParameterShift)->Arg(1)->Arg(3)->Arg(9);

void BM_ObjectiveAndGradient(benchmark::State &state) {
    const auto c = build_paper_circuit();
    const auto p = random_params(c, 3);
    const auto obs = Observable::z_string(3);
    const auto data = generate_circle_dataset(200, 0);
    TrainConfig cfg;
    cfg.lambda = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(objective_and_gradient(c, p, obs, data, cfg));
    }
}
BENCHMARK(BM_ObjectiveAndGradient);

void BM_LipschitzBounds(benchmark::State &state) {
    const auto c = build_paper_circuit();
    const auto p = random_params(c, 4);
    const auto obs = Observable::z_string(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(make_bound_report(c, p, obs));
    }
}
BENCHMARK(BM_LipschitzBounds);

void BM_WorstCase(benchmark::State &state) {
    const auto c = build_paper_circuit();
    const auto p = random_params(c, 5);
    const auto obs = Observable::z_string(3);
    const auto test = generate_circle_dataset(100, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(worst_case_accuracy(c, p, obs, test, 0.1, 50, 0));
    }
}
BENCHMARK(BM_WorstCase);

} // namespace

BENCHMARK_MAIN();
