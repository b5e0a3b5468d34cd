#include "delaynet/signal.hpp"

#include <numeric>

namespace delaynet {

int SpikeTrain::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

int SpikeTrain::first_spike_step() const {
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > 0) return static_cast<int>(k);
  }
  return -1;
}

void SpikeTrain::validate() const {
  grid.validate();
  require(static_cast<int>(counts.size()) == grid.steps, ErrorKind::config,
          "SpikeTrain: count vector length must equal grid.steps");
  for (int c : counts) {
    require(c >= 0, ErrorKind::contract, "SpikeTrain: negative spike count");
  }
}

Signal convolve_causal(const Signal& kernel, const SpikeTrain& train) {
  require(kernel.grid == train.grid, ErrorKind::config,
          "convolve_causal: kernel and train must share a grid");
  Signal out = Signal::zeros(kernel.grid);
  for (int m = 0; m < train.grid.steps; ++m) {
    if (train[m] != 0) {
      detail::add_shifted_kernel(kernel.values, m, train[m], out.values);
    }
  }
  return out;
}

SpikeTrain shift_right(const SpikeTrain& x, int k) {
  require(k >= 0, ErrorKind::contract, "shift_right: shift must be non-negative");
  SpikeTrain out = SpikeTrain::empty(x.grid);
  for (int j = k; j < x.grid.steps; ++j) {
    out.counts[static_cast<std::size_t>(j)] = x[j - k];
  }
  return out;
}

double inner_product(const Signal& x, const Signal& y) {
  require(x.grid == y.grid, ErrorKind::config,
          "inner_product: signals must share a grid");
  double acc = 0.0;
  for (int k = 0; k < x.grid.steps; ++k) {
    acc += x[k] * y[k];
  }
  return acc * x.grid.dt_ms;
}

namespace detail {

void convolve_causal_span(std::span<const double> kernel,
                          std::span<const double> in, std::span<double> out) {
  std::size_t n = out.size();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t m = 0; m <= k; ++m) {
      acc += kernel[k - m] * in[m];
    }
    out[k] = acc;
  }
}

}  // namespace detail

}  // namespace delaynet
