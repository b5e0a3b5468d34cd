#include "delaynet/loss.hpp"

#include <algorithm>

namespace delaynet {

std::vector<SpikeTrain> make_target(int label, const TargetSpec& spec) {
  require(label >= 0 && label < spec.num_classes, ErrorKind::input,
          "make_target: label out of range");
  std::vector<SpikeTrain> target;
  target.reserve(static_cast<std::size_t>(spec.num_classes));
  for (int j = 0; j < spec.num_classes; ++j) {
    SpikeTrain t = SpikeTrain::empty(spec.grid);
    if (j == label) {
      std::fill(t.counts.begin(), t.counts.end(), 1);
    }
    target.push_back(std::move(t));
  }
  return target;
}

std::pair<double, std::vector<Signal>> loss_and_error(
    std::span<const SpikeTrain> output, std::span<const SpikeTrain> target,
    const Signal& eps) {
  require(output.size() == target.size(), ErrorKind::contract,
          "loss_and_error: output/target neuron counts differ");
  std::vector<Signal> errors;
  errors.reserve(output.size());
  double loss = 0.0;
  for (std::size_t j = 0; j < output.size(); ++j) {
    require(output[j].grid == eps.grid && target[j].grid == eps.grid,
            ErrorKind::contract, "loss_and_error: grid mismatch");
    Signal a_out = convolve_causal(eps, output[j]);
    Signal a_tgt = convolve_causal(eps, target[j]);
    Signal e = Signal::zeros(eps.grid);
    for (int k = 0; k < eps.grid.steps; ++k) {
      e[k] = a_out[k] - a_tgt[k];
      loss += e[k] * e[k];
    }
    errors.push_back(std::move(e));
  }
  loss *= 0.5 * eps.grid.dt_ms;
  return {loss, std::move(errors)};
}

Prediction decode(std::span<const SpikeTrain> output) {
  Prediction p;
  p.first_spike_step.reserve(output.size());
  p.spike_count.reserve(output.size());
  int best_first = -1;
  int best_count = 0;
  for (std::size_t j = 0; j < output.size(); ++j) {
    int first = output[j].first_spike_step();
    int count = output[j].total();
    p.first_spike_step.push_back(first);
    p.spike_count.push_back(count);
    if (first < 0) continue;
    bool wins = p.class_index == Prediction::kNone || first < best_first ||
                (first == best_first && count > best_count);
    if (wins) {
      p.class_index = static_cast<int>(j);
      best_first = first;
      best_count = count;
    }
  }
  return p;
}

namespace detail {

int decode_flat(std::span<const std::uint8_t> spikes, int neurons, int steps) {
  int best = Prediction::kNone;
  int best_first = -1;
  int best_count = 0;
  for (int j = 0; j < neurons; ++j) {
    const std::uint8_t* row = spikes.data() + static_cast<std::size_t>(j) * steps;
    int first = -1;
    int count = 0;
    for (int k = 0; k < steps; ++k) {
      if (row[k]) {
        if (first < 0) first = k;
        ++count;
      }
    }
    if (first < 0) continue;
    if (best == Prediction::kNone || first < best_first ||
        (first == best_first && count > best_count)) {
      best = j;
      best_first = first;
      best_count = count;
    }
  }
  return best;
}

double loss_error_flat(std::span<const std::uint8_t> spikes, int neurons,
                       int steps, int label, std::span<const double> eps,
                       std::span<const double> target_psp, double dt_ms,
                       std::span<double> e_out) {
  double loss = 0.0;
  for (int j = 0; j < neurons; ++j) {
    const std::uint8_t* row = spikes.data() + static_cast<std::size_t>(j) * steps;
    std::span<double> e{e_out.data() + static_cast<std::size_t>(j) * steps,
                        static_cast<std::size_t>(steps)};
    std::fill(e.begin(), e.end(), 0.0);
    for (int m = 0; m < steps; ++m) {
      if (row[m]) add_shifted_kernel(eps, m, 1.0, e);
    }
    if (j == label) {
      for (int k = 0; k < steps; ++k) e[static_cast<std::size_t>(k)] -= target_psp[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < steps; ++k) {
      loss += e[static_cast<std::size_t>(k)] * e[static_cast<std::size_t>(k)];
    }
  }
  return 0.5 * dt_ms * loss;
}

}  // namespace detail

}  // namespace delaynet
