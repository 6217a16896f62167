// Serial vs OpenMP timings for the main kernels.
#include <benchmark/benchmark.h>

#include <random>

#include "nn2poly/trainer.hpp"
#include "nn2poly/transform.hpp"

using namespace nn2poly;

namespace {

const NetworkSpec& network() {
    static const NetworkSpec net = initialize_network(5, parse_architecture("50:tanh,100:tanh,50:tanh,1:linear"), 1);
    return net;
}

const Matrix& inputs() {
    static const Matrix x = [] {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> nd;
        Matrix m(20000, 5);
        for (double& v : m.flat()) v = nd(rng);
        return m;
    }();
    return x;
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_forward(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(forward(network(), inputs(), mode(state)));
}

void BM_eval_poly(benchmark::State& state) {
    static const Polynomial poly = transform(network()).polynomial;
    for (auto _ : state) benchmark::DoNotOptimize(eval_poly(poly, inputs(), mode(state)));
}

void BM_transform(benchmark::State& state) {
    TransformConfig cfg;
    cfg.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(transform(network(), cfg));
}

}  // namespace

BENCHMARK(BM_forward)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_eval_poly)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_transform)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
