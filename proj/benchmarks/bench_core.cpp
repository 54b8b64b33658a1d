#include <benchmark/benchmark.h>

#include "actsamp/schemes.hpp"
#include "actsamp/surrogates.hpp"
#include "actsamp/synthetic.hpp"

namespace {

using namespace actsamp;

SamplingScheme make_scheme(int n) {
  RandomStream rng(7);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = rng.uniform() + 0.01;
  return SamplingScheme::from_weights(w);
}

void bm_draw_multinomial(benchmark::State& state) {
  const int population = int(state.range(0));
  const int batch = int(state.range(1));
  SamplingScheme scheme = make_scheme(population);
  RandomStream rng(11);
  for (auto _ : state) {
    BatchDraw draw = draw_multinomial(scheme, batch, rng);
    benchmark::DoNotOptimize(draw.counts.data());
  }
}
BENCHMARK(bm_draw_multinomial)->Args({1000, 10})->Args({1000, 100})->Args({100000, 100});

void bm_scheme_from_weights(benchmark::State& state) {
  const int population = int(state.range(0));
  RandomStream rng(3);
  Eigen::VectorXd w(population);
  for (int i = 0; i < population; ++i) w(i) = rng.uniform();
  for (auto _ : state) {
    SamplingScheme scheme = SamplingScheme::from_weights(w);
    benchmark::DoNotOptimize(scheme.probabilities.data());
  }
}
BENCHMARK(bm_scheme_from_weights)->Arg(1000)->Arg(100000);

void bm_exact_hh_covariance(benchmark::State& state) {
  const int population = int(state.range(0));
  SamplingScheme scheme = make_scheme(population);
  RandomStream rng(5);
  Eigen::MatrixXd y(population, 2);
  for (int i = 0; i < population; ++i) {
    y(i, 0) = rng.normal();
    y(i, 1) = rng.normal();
  }
  for (auto _ : state) {
    Eigen::MatrixXd cov = exact_hh_covariance(y, scheme, 10);
    benchmark::DoNotOptimize(cov.data());
  }
}
BENCHMARK(bm_exact_hh_covariance)->Arg(1000)->Arg(100000);

void bm_kernel_ridge_fit(benchmark::State& state) {
  const int labeled = int(state.range(0));
  SyntheticSpec spec;
  spec.population_size = 1000;
  spec.kernel_bandwidth = 0.5;
  spec.seed = 13;
  SyntheticData data = generate_synthetic(spec);
  std::vector<int> idx;
  Eigen::MatrixXd resp(labeled, 1), aux(labeled, 1);
  for (int i = 0; i < labeled; ++i) {
    const int j = i * (spec.population_size / labeled);
    idx.push_back(j);
    resp(i, 0) = data.y(j);
    aux(i, 0) = data.z(j);
  }
  LabeledSet set = LabeledSet::create(idx, resp, aux);
  Eigen::MatrixXd all_aux = data.z;
  SurrogateConfig config;
  for (auto _ : state) {
    SurrogateFit fit = fit_surrogate(set, all_aux, config);
    benchmark::DoNotOptimize(fit.predicted_means.data());
  }
}
BENCHMARK(bm_kernel_ridge_fit)->Arg(50)->Arg(100)->Arg(200);

void bm_generate_synthetic(benchmark::State& state) {
  SyntheticSpec spec;
  spec.population_size = int(state.range(0));
  spec.kernel_bandwidth = 1.0;
  for (auto _ : state) {
    spec.seed += 1;
    SyntheticData data = generate_synthetic(spec);
    benchmark::DoNotOptimize(data.y.data());
  }
}
BENCHMARK(bm_generate_synthetic)->Arg(500)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
