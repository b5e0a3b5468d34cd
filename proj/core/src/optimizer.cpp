#include "delaynet/optimizer.hpp"

#include <cmath>

namespace delaynet {

bool delays_trained(TrainMode mode) {
  return mode != TrainMode::weights_baseline;
}

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::delays_only_free_weights: return "delays-free";
    case TrainMode::delays_only_ternary_weights: return "delays-ternary";
    case TrainMode::weights_baseline: return "weights-baseline";
  }
  return "?";
}

TrainMode parse_train_mode(const std::string& name) {
  if (name == "delays-free") return TrainMode::delays_only_free_weights;
  if (name == "delays-ternary") return TrainMode::delays_only_ternary_weights;
  if (name == "weights-baseline") return TrainMode::weights_baseline;
  throw Error(ErrorKind::input,
              "unknown training mode '" + name +
                  "' (expected delays-free, delays-ternary or weights-baseline)");
}

void AdamState::init_like(std::span<const std::span<double>> param_slices) {
  t = 0;
  m.clear();
  v.clear();
  for (const auto& slice : param_slices) {
    m.emplace_back(slice.size(), 0.0);
    v.emplace_back(slice.size(), 0.0);
  }
}

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads) {
  require(params.size() == grads.size(), ErrorKind::contract,
          "adam_step: params/grads slice counts differ");
  require(state.m.size() == params.size(), ErrorKind::contract,
          "adam_step: state not initialized for these parameters");
  for (std::size_t s = 0; s < params.size(); ++s) {
    require(params[s].size() == grads[s].size() &&
                params[s].size() == state.m[s].size(),
            ErrorKind::contract, "adam_step: slice shape mismatch");
    for (double g : grads[s]) {
      require(std::isfinite(g), ErrorKind::numeric,
              "adam_step: non-finite gradient, aborting batch");
    }
  }

  state.t += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t s = 0; s < params.size(); ++s) {
    std::span<double> p = params[s];
    std::span<const double> g = grads[s];
    std::vector<double>& ms = state.m[s];
    std::vector<double>& vs = state.v[s];
    for (std::size_t n = 0; n < p.size(); ++n) {
      ms[n] = state.beta1 * ms[n] + (1.0 - state.beta1) * g[n];
      vs[n] = state.beta2 * vs[n] + (1.0 - state.beta2) * g[n] * g[n];
      double mhat = ms[n] / bc1;
      double vhat = vs[n] / bc2;
      p[n] -= state.lr * mhat / (std::sqrt(vhat) + state.eps_hat);
    }
  }
}

void constrain(std::span<LayerParams> params, TrainMode mode, double d_max_ms) {
  (void)mode;
  for (LayerParams& layer : params) {
    require(layer.delays.d_max_ms() == d_max_ms, ErrorKind::contract,
            "constrain: d_max does not match the delay matrices");
    layer.delays.clamp_and_requantize();
  }
}

std::vector<std::span<double>> trainable_params(std::span<LayerParams> params,
                                                TrainMode mode) {
  std::vector<std::span<double>> out;
  for (LayerParams& layer : params) {
    if (delays_trained(mode)) {
      out.push_back(layer.delays.mutable_values());
    } else {
      out.push_back(layer.weights.flat());
    }
  }
  return out;
}

std::vector<std::span<const double>> trainable_grads(GradientSet& grads,
                                                     TrainMode mode) {
  std::vector<std::span<const double>> out;
  bool delays = delays_trained(mode);
  std::vector<Matrix>& source = delays ? grads.delay_grad : grads.weight_grad;
  for (Matrix& m : source) {
    out.push_back(m.flat());
  }
  return out;
}

}  // namespace delaynet
