#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "delaynet/gradient.hpp"
#include "delaynet/network.hpp"

namespace delaynet {

enum class TrainMode {
  delays_only_free_weights,
  delays_only_ternary_weights,
  weights_baseline,
};

bool delays_trained(TrainMode mode);
std::string to_string(TrainMode mode);
TrainMode parse_train_mode(const std::string& name);  // throws input error

// Adam with bias correction:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   p <- p - lr * mhat / (sqrt(vhat) + eps)
// One (m, v) pair per parameter slice.
struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  std::uint64_t t = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  void init_like(std::span<const std::span<double>> param_slices);
  bool initialized() const { return !m.empty(); }
};

// One step over matching parameter/gradient slices. Throws a numeric
// error (before touching any state) if a gradient is non-finite.
void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads);

// Project parameters back onto their constraint set after a step: delays
// clamped to [0, d_max] (with the quantized view refreshed). Weights are
// untouched; the mode contract that frozen/ternary weights never change
// is enforced by never handing them to the optimizer.
void constrain(std::span<LayerParams> params, TrainMode mode, double d_max_ms);

// The parameter slices a mode trains, in layer order: delays for the
// delays-only modes, weights for the baseline.
std::vector<std::span<double>> trainable_params(std::span<LayerParams> params,
                                                TrainMode mode);
std::vector<std::span<const double>> trainable_grads(GradientSet& grads,
                                                     TrainMode mode);

}  // namespace delaynet
