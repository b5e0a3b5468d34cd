// Throughput benchmarks at the stock architecture (784-800-10, K = 10),
// driven by synthetic threshold-encoded inputs with a realistic count of
// active pixels.

#include <benchmark/benchmark.h>

#include <random>

#include "delaynet/gradient.hpp"
#include "delaynet/loss.hpp"
#include "delaynet/optimizer.hpp"

using namespace delaynet;

namespace {

struct Fixture {
  TimeGrid grid{1.0, 10};
  SrmConfig srm{10.0, 1.0, 1.0};
  KernelTable kernels = eval_kernels(srm, grid);
  SurrogateConfig surrogate{1.0, 0.03};
  std::vector<LayerParams> params;
  std::vector<std::vector<SpikeTrain>> inputs;
  std::vector<int> labels;
  std::vector<double> target_psp;

  explicit Fixture(int active_pixels = 150, int samples = 16) {
    NetworkConfig net;
    net.layer_sizes = {784, 800, 10};
    net.grid = grid;
    net.srm = srm;
    net.seed = 1;
    params = init_network(net);

    std::mt19937 gen(7);
    for (int s = 0; s < samples; ++s) {
      std::vector<SpikeTrain> input(784, SpikeTrain::empty(grid));
      for (int a = 0; a < active_pixels; ++a) {
        input[gen() % 784].counts[0] = 1;
      }
      inputs.push_back(std::move(input));
      labels.push_back(static_cast<int>(gen() % 10));
    }
    SpikeTrain ones = SpikeTrain::empty(grid);
    std::fill(ones.counts.begin(), ones.counts.end(), 1);
    target_psp = convolve_causal(kernels.eps, ones).values;
  }
};

void BM_Forward(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  ForwardTrace trace;
  std::size_t n = 0;
  for (auto _ : state) {
    forward(f.params, f.inputs[n % f.inputs.size()], f.kernels, f.srm, trace);
    benchmark::DoNotOptimize(trace.layers.back().spikes.data());
    ++n;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_Forward)->Arg(150)->Arg(300)->Unit(benchmark::kMicrosecond);

void BM_TrainStep(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  ForwardTrace trace;
  GradientSet grads;
  grads.init_like(f.params);
  BackwardScratch scratch;
  std::vector<double> error(10 * static_cast<std::size_t>(f.grid.steps));
  std::size_t n = 0;
  for (auto _ : state) {
    const auto& input = f.inputs[n % f.inputs.size()];
    forward(f.params, input, f.kernels, f.srm, trace);
    const LayerTrace& out = trace.layers.back();
    detail::loss_error_flat(out.spikes, out.post, f.grid.steps,
                            f.labels[n % f.labels.size()], f.kernels.eps.values,
                            f.target_psp, f.grid.dt_ms, error);
    backward_accumulate(trace, f.params, f.kernels, f.srm, f.surrogate, error,
                        grads, scratch, true, DerivativeStencil::upwind);
    benchmark::DoNotOptimize(grads.delay_grad[0].flat().data());
    ++n;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_TrainStep)->Arg(150)->Arg(300)->Unit(benchmark::kMicrosecond);

void BM_AdamStep(benchmark::State& state) {
  Fixture f(150);
  GradientSet grads;
  grads.init_like(f.params);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> dist(-0.01, 0.01);
  for (Matrix& m : grads.delay_grad) {
    for (double& v : m.flat()) v = dist(gen);
  }
  AdamState adam;
  auto views = trainable_params(f.params, TrainMode::delays_only_free_weights);
  adam.init_like(views);
  auto gviews = trainable_grads(grads, TrainMode::delays_only_free_weights);
  for (auto _ : state) {
    adam_step(adam, views, gviews);
    constrain(f.params, TrainMode::delays_only_free_weights, f.grid.duration_ms());
    benchmark::DoNotOptimize(f.params[0].delays.values().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_AdamStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
