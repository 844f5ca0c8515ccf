#include <benchmark/benchmark.h>

#include <random>

#include "panscope/conv.hpp"
#include "panscope/detector.hpp"
#include "panscope/ks.hpp"
#include "panscope/planted.hpp"
#include "panscope/synthetic.hpp"

using namespace panscope;

namespace {

std::vector<double> uniform(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(gen);
    return v;
}

ConvLayerSpec layer(std::size_t channels, PaddingPolicy policy) {
    ConvLayerSpec l;
    l.name = "bench";
    l.in_channels = l.out_channels = channels;
    l.kernel_height = l.kernel_width = 3;
    l.padding = 1;
    l.policy = policy;
    l.weights = Tensor(Shape{channels, channels, 3, 3});
    const auto w = uniform(l.weights.values().size(), 1);
    for (std::size_t i = 0; i < w.size(); ++i) l.weights.data()[i] = static_cast<float>(w[i] - 0.5);
    l.bias.assign(channels, 0.0f);
    return l;
}

} // namespace

static void BM_KsTwoSample(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = uniform(n, 1);
    const auto b = uniform(n * 8, 2);
    for (auto _ : state) benchmark::DoNotOptimize(ks_statistics(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KsTwoSample)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_Conv3x3(benchmark::State& state) {
    const auto extent = static_cast<std::size_t>(state.range(0));
    const auto policy = state.range(1) ? PaddingPolicy::reflect : PaddingPolicy::zero;
    const ConvLayerSpec l = layer(16, policy);
    Tensor x(Shape{4, 16, extent, extent});
    const auto v = uniform(x.values().size(), 3);
    for (std::size_t i = 0; i < v.size(); ++i) x.data()[i] = static_cast<float>(v[i]);
    for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, l));
    state.SetItemsProcessed(state.iterations() * 4 * 16 * 16 * 9 * static_cast<std::int64_t>(extent * extent));
}
BENCHMARK(BM_Conv3x3)->ArgsProduct({{16, 32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_CensusReference(benchmark::State& state) {
    const auto net = build_synthetic_network(reference_template(), reference_plants(), {});
    const Tensor batch = make_synthetic_batch({7, 16, 64, 64, 3});
    for (auto _ : state) benchmark::DoNotOptimize(census(net.model, batch, {0.5}));
}
BENCHMARK(BM_CensusReference)->Unit(benchmark::kMillisecond)->Iterations(3);

BENCHMARK_MAIN();
