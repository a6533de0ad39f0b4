#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rfdfar/channel.hpp"
#include "rfdfar/features.hpp"
#include "rfdfar/knn.hpp"
#include "rfdfar/preprocess.hpp"
#include "rfdfar/wavelet.hpp"

namespace {

std::vector<double> noise(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

void BM_DwtForward(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfdfar::dsp::dwt_forward(x, 13));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DwtForward)->Arg(1 << 16)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_DwtRoundTrip(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfdfar::dsp::dwt_inverse(rfdfar::dsp::dwt_forward(x, 13)));
  }
}
BENCHMARK(BM_DwtRoundTrip)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_SureThreshold(benchmark::State& state) {
  const auto d = rfdfar::dsp::dwt_forward(noise(static_cast<std::size_t>(state.range(0)), 3), 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfdfar::dsp::sure_threshold(d));
  }
}
BENCHMARK(BM_SureThreshold)->Arg(1 << 16)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_Denoise(benchmark::State& state) {
  const auto t = rfdfar::channel::simulate_trace(
      rfdfar::channel::preset_envelope(rfdfar::GestureLabel::Clapping), 0, 1.0, rfdfar::SnrDb(22),
      42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfdfar::dsp::denoise(t));
  }
}
BENCHMARK(BM_Denoise)->Unit(benchmark::kMillisecond);

void BM_SimulateTrace(benchmark::State& state) {
  const auto spec = rfdfar::channel::preset_envelope(rfdfar::GestureLabel::HandsUp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfdfar::channel::simulate_trace(spec, 0, 1.0, rfdfar::SnrDb(12), 7));
  }
}
BENCHMARK(BM_SimulateTrace)->Unit(benchmark::kMillisecond);

rfdfar::features::FeatureTable random_table(std::size_t rows) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  rfdfar::features::FeatureTable t;
  for (std::size_t i = 0; i < rows; ++i) {
    const double shift = static_cast<double>(i % 3);
    const double row[2] = {g(rng) + shift, g(rng) - shift};
    t.add_row(row, "c" + std::to_string(i % 3));
  }
  return t;
}

void BM_KnnPredict(benchmark::State& state) {
  const auto t = random_table(static_cast<std::size_t>(state.range(0)));
  const auto m = rfdfar::knn::KnnModel::fit(t, 6);
  const double q[2] = {0.3, -0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.predict(q));
  }
}
BENCHMARK(BM_KnnPredict)->Arg(150)->Arg(750)->Arg(5000);

void BM_KfoldCv(benchmark::State& state) {
  const auto t = random_table(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfdfar::knn::kfold_cv(t, 10, 6, rfdfar::knn::Weighting::InverseDistance, 42));
  }
}
BENCHMARK(BM_KfoldCv)->Arg(750)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
