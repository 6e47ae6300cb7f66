// Serial reference paths against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "dasp/dyson_mc.hpp"
#include "dasp/fredholm.hpp"
#include "dasp/kernels.hpp"

using namespace dasp;

namespace {

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

std::vector<double> grid(int m, double lo, double hi) {
    std::vector<double> g(m);
    for (int i = 0; i < m; ++i) g[i] = lo + (hi - lo) * i / (m - 1);
    return g;
}

void BM_KernelMatrixAiry(benchmark::State& st) {
    const auto spec = ExtendedKernelSpec::airy(0.5, 0.0);
    const auto xs = grid(64, -2.0, 4.0);
    for (auto _ : st) benchmark::DoNotOptimize(kernel_matrix(spec, xs, xs, mode(st)));
}
BENCHMARK(BM_KernelMatrixAiry)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_KernelMatrixHermite(benchmark::State& st) {
    const auto spec = ExtendedKernelSpec::hermite(200, 0.0, 0.2);
    const auto xs = grid(128, -25.0, 25.0);
    for (auto _ : st) benchmark::DoNotOptimize(kernel_matrix(spec, xs, xs, mode(st)));
}
BENCHMARK(BM_KernelMatrixHermite)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_AiryJointDeterminant(benchmark::State& st) {
    FredholmConfig cfg;
    cfg.fixed_order = 48;
    cfg.exec = mode(st);
    for (auto _ : st)
        benchmark::DoNotOptimize(joint_probability(Process::airy, {}, 0.0, 1.0, IntervalUnion::below(-1.0),
                                                   IntervalUnion::below(0.0), cfg));
}
BENCHMARK(BM_AiryJointDeterminant)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_MonteCarloJoint(benchmark::State& st) {
    OUConfig cfg;
    cfg.n = 4;
    cfg.times = {0.0, 0.5};
    cfg.samples = 20000;
    const IntervalUnion E = IntervalUnion::interval(-2.5, 2.5);
    for (auto _ : st) benchmark::DoNotOptimize(estimate_joint(cfg, 0.0, 0.5, E, E, mode(st)));
}
BENCHMARK(BM_MonteCarloJoint)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
