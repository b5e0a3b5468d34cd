#pragma once

#include <span>
#include <vector>

#include "delaynet/network.hpp"
#include "delaynet/signal.hpp"

namespace delaynet {

struct TargetSpec {
  int num_classes = 10;
  TimeGrid grid;
};

// Target for class c: neuron c spikes at every step of the window, all
// other neurons stay silent.
std::vector<SpikeTrain> make_target(int label, const TargetSpec& spec);

struct Prediction {
  static constexpr int kNone = -1;
  int class_index = kNone;
  std::vector<int> first_spike_step;  // -1 where silent
  std::vector<int> spike_count;

  bool is_none() const { return class_index == kNone; }
};

// Error signal per neuron e_j = eps * (output_j - target_j), computed as
// the difference of the two eps-convolutions, and the scalar loss
// E = 1/2 sum_j sum_k e_j[k]^2 dt.
std::pair<double, std::vector<Signal>> loss_and_error(
    std::span<const SpikeTrain> output, std::span<const SpikeTrain> target,
    const Signal& eps);

// First-spike decoding: earliest first spike wins; ties broken by larger
// total spike count, then by lower neuron index. All-silent output decodes
// to none (scored as incorrect).
Prediction decode(std::span<const SpikeTrain> output);

namespace detail {

// Flat variants used by the trainer (spike rows of length `steps`).
int decode_flat(std::span<const std::uint8_t> spikes, int neurons, int steps);

// e_out gets neurons x steps error samples; returns the loss. target_psp
// is eps convolved with the all-ones train, precomputed once per run.
double loss_error_flat(std::span<const std::uint8_t> spikes, int neurons,
                       int steps, int label, std::span<const double> eps,
                       std::span<const double> target_psp, double dt_ms,
                       std::span<double> e_out);

}  // namespace detail

}  // namespace delaynet
