// Serial reference vs OpenMP paths for the coarse search, a single
// multistart fit and a batch of fits.

#include "hip/core.hpp"
#include "hip/fit.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

namespace {

struct Video {
    hip::DailySeries views;
    hip::DailySeries shares;
};

Video make_video(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> s(120);
    const double peak = std::uniform_real_distribution<double>(20.0, 200.0)(rng);
    for (std::size_t t = 0; t < s.size(); ++t) {
        s[t] = static_cast<double>(std::poisson_distribution<long>(peak * std::exp(-double(t) / 15.0) + 3.0)(rng));
    }
    const hip::HipParams p{std::uniform_real_distribution<double>(1.0, 40.0)(rng), 0.4, 1.0, 0.8};
    hip::DailySeries shares(std::move(s), hip::SeriesKind::shares);
    return {hip::simulate(p, shares, 120), shares};
}

hip::Execution mode(const benchmark::State& state) {
    return state.range(0) == 0 ? hip::Execution::serial : hip::Execution::parallel;
}

void BM_CoarseSearch(benchmark::State& state) {
    const auto video = make_video(1);
    std::mt19937_64 rng(3);
    std::vector<hip::HipParams> samples(1000);
    for (auto& p : samples) {
        p = {std::uniform_real_distribution<double>(0.1, 50.0)(rng), std::uniform_real_distribution<double>(0.0, 2.0)(rng),
             std::uniform_real_distribution<double>(0.1, 5.0)(rng), std::uniform_real_distribution<double>(0.1, 2.0)(rng)};
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(hip::coarse_search(samples, video.views, video.shares, 90, mode(state)));
    }
}

void BM_Fit(benchmark::State& state) {
    const auto video = make_video(2);
    hip::FitConfig cfg;
    cfg.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(hip::fit(video.views, video.shares, cfg));
}

void BM_FitBatch(benchmark::State& state) {
    std::vector<Video> videos;
    for (std::uint64_t i = 0; i < 16; ++i) videos.push_back(make_video(100 + i));
    std::vector<hip::FitTask> tasks;
    for (const auto& v : videos) tasks.push_back({&v.views, &v.shares});
    hip::FitConfig cfg;
    cfg.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(hip::fit_batch(tasks, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tasks.size()));
}

}  // namespace

// Argument 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_CoarseSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Fit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
