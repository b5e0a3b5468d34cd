#pragma once

#include <span>
#include <vector>

#include "delaynet/error.hpp"

namespace delaynet {

// Discrete simulation window: `steps` samples spaced `dt_ms` apart,
// covering [0, duration_ms()).
struct TimeGrid {
  double dt_ms = 1.0;
  int steps = 10;

  double duration_ms() const { return dt_ms * steps; }
  double time_at(int k) const { return dt_ms * k; }
  bool operator==(const TimeGrid&) const = default;

  void validate() const {
    require(dt_ms > 0.0, ErrorKind::config, "TimeGrid: dt must be positive");
    require(steps >= 1, ErrorKind::config, "TimeGrid: steps must be >= 1");
  }
};

// Real-valued sample per step (mV or unitless, by context).
struct Signal {
  TimeGrid grid;
  std::vector<double> values;

  static Signal zeros(const TimeGrid& g) {
    return Signal{g, std::vector<double>(static_cast<std::size_t>(g.steps), 0.0)};
  }
  double& operator[](int k) { return values[static_cast<std::size_t>(k)]; }
  double operator[](int k) const { return values[static_cast<std::size_t>(k)]; }
};

// Spike counts per step. The SRM simulator and the encoder only ever emit
// 0/1 per step; general non-negative counts are allowed so trains form a
// monoid under addition (used by the linearity properties).
struct SpikeTrain {
  TimeGrid grid;
  std::vector<int> counts;

  static SpikeTrain empty(const TimeGrid& g) {
    return SpikeTrain{g, std::vector<int>(static_cast<std::size_t>(g.steps), 0)};
  }
  static SpikeTrain single(const TimeGrid& g, int step) {
    SpikeTrain t = empty(g);
    t.counts[static_cast<std::size_t>(step)] = 1;
    return t;
  }

  int operator[](int k) const { return counts[static_cast<std::size_t>(k)]; }
  int total() const;
  // First step with a spike, or -1 if the train is empty.
  int first_spike_step() const;

  void validate() const;
};

// out[k] = sum_{m <= k} kernel[k - m] * train[m]. Causal by construction:
// out[k] depends only on train[0..k].
Signal convolve_causal(const Signal& kernel, const SpikeTrain& train);

// out[j] = x[j - k] for j >= k, zero before; spikes shifted past the end
// of the window are dropped.
SpikeTrain shift_right(const SpikeTrain& x, int k);

// Discretization of the window integral: sum_k x[k] * y[k] * dt.
double inner_product(const Signal& x, const Signal& y);

namespace detail {

// out[k] += scale * kernel[k - at] for k >= at. The span workhorse behind
// convolve_causal and the per-layer PSP accumulation.
inline void add_shifted_kernel(std::span<const double> kernel, int at,
                               double scale, std::span<double> out) {
  int n = static_cast<int>(out.size());
  for (int k = at < 0 ? 0 : at; k < n; ++k) {
    out[static_cast<std::size_t>(k)] +=
        scale * kernel[static_cast<std::size_t>(k - at)];
  }
}

// Dense causal convolution of a real-valued input (used by the adjoint
// tests, where "trains" are arbitrary real vectors).
void convolve_causal_span(std::span<const double> kernel,
                          std::span<const double> in, std::span<double> out);

}  // namespace detail

}  // namespace delaynet
