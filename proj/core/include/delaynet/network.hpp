#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "delaynet/delay.hpp"
#include "delaynet/matrix.hpp"
#include "delaynet/rng.hpp"
#include "delaynet/signal.hpp"
#include "delaynet/srm.hpp"

namespace delaynet {

// One fully connected synaptic layer: per-synapse weights and delays,
// both post x pre.
struct LayerParams {
  Matrix weights;
  DelayMatrix delays;
  bool weights_frozen = true;
  bool weights_ternary = false;

  int post() const { return weights.post(); }
  int pre() const { return weights.pre(); }
};

struct WeightInit {
  double mean = 0.0;
  double stddev = 1.0;
  double scale = 10.0;
};

struct NetworkConfig {
  std::vector<int> layer_sizes{784, 800, 10};
  SrmConfig srm;
  TimeGrid grid;
  std::uint64_t seed = 1;
  bool ternary_weights = false;
  double delay_init_max_ms = 1.0;
  double d_max_ms = -1.0;  // < 0 means the full window duration
  // One entry per synaptic layer; empty selects the built-in defaults,
  // which are defined for the two-synaptic-layer architecture only.
  std::vector<WeightInit> weight_init;

  int synaptic_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  double effective_d_max() const {
    return d_max_ms < 0.0 ? grid.duration_ms() : d_max_ms;
  }
  void validate() const;
};

// Round to the nearest value in {-1, 0, 1}, halves away from zero.
// Applied to pre-scale weights when building ternary layers.
double ternary_round(double w);

// How per-synapse delays act on the presynaptic PSP:
//   quantized  -- floor to whole steps; the inference behavior, and the
//                 only one spikes can realize on the grid.
//   fractional -- linear interpolation between the two neighboring whole-
//                 step shifts, so the forward is continuous in the stored
//                 real delay. Used by the training pass so that delay
//                 updates act between grid points instead of in bucket
//                 jumps.
enum class DelayForward { quantized, fractional };

// Weights ~ Normal(mean, stddev) * scale per layer (ternary rounding, when
// enabled, happens before the scale); delays ~ Uniform[0, delay_init_max).
// Deterministic under cfg.seed.
std::vector<LayerParams> init_network(const NetworkConfig& cfg);

// Everything the backward pass needs from one forward evaluation.
// Per-synapse delayed PSPs are kept in factored form: the undelayed
// presynaptic PSP x_i = eps * s_i plus the quantized delay view in the
// layer's DelayMatrix; a_ij is x_i shifted right by q_ij (see
// synapse_psp()). Flat row-major buffers, row length = grid.steps.
struct LayerTrace {
  int pre = 0;
  int post = 0;
  int steps = 0;
  // All active presynaptic trains are a single spike at step 0, so every
  // active PSP row equals eps. Threshold-encoded inputs always satisfy
  // this; the per-synapse loops then collapse to delay-indexed tables.
  bool common_input_psp = false;
  std::vector<double> pre_psp;         // pre x steps
  std::vector<std::uint8_t> pre_active;  // pre flags: any presynaptic spike
  std::vector<double> membrane;        // post x steps
  std::vector<std::uint8_t> spikes;    // post x steps

  std::span<const double> psp_row(int i) const {
    return {pre_psp.data() + static_cast<std::size_t>(i) * steps,
            static_cast<std::size_t>(steps)};
  }
  std::span<const double> membrane_row(int j) const {
    return {membrane.data() + static_cast<std::size_t>(j) * steps,
            static_cast<std::size_t>(steps)};
  }
  std::span<const std::uint8_t> spike_row(int j) const {
    return {spikes.data() + static_cast<std::size_t>(j) * steps,
            static_cast<std::size_t>(steps)};
  }
};

struct ForwardTrace {
  TimeGrid grid;
  DelayForward delay_mode = DelayForward::quantized;
  std::vector<int> input_counts;  // first layer's input trains, pre0 x steps
  std::vector<LayerTrace> layers;

  Signal membrane_of(int layer, int j) const;
  SpikeTrain spikes_of(int layer, int j) const;
  std::vector<SpikeTrain> output_trains() const;
};

// Delayed per-synapse PSP a_ij(t) for layer `l`, reconstructed from the
// factored trace.
Signal synapse_psp(const ForwardTrace& trace, std::span<const LayerParams> params,
                   int l, int j_post, int i_pre);

// Layer-by-layer forward pass: per synapse, delay the presynaptic train,
// convolve with eps, weight-sum into the drive, then run the SRM threshold
// dynamics. `trace` is reused across calls to avoid reallocation.
void forward(std::span<const LayerParams> params, std::span<const SpikeTrain> input,
             const KernelTable& kernels, const SrmConfig& srm, ForwardTrace& trace,
             DelayForward delay_mode = DelayForward::quantized);

ForwardTrace forward(std::span<const LayerParams> params,
                     std::span<const SpikeTrain> input,
                     const KernelTable& kernels, const SrmConfig& srm,
                     DelayForward delay_mode = DelayForward::quantized);

namespace detail {

// drive_j[k] += sum_i w_ij * x_i(k - d_ij/dt), the linear half of a
// layer's forward pass; the delayed sample is the whole-step shift or the
// two-tap interpolation depending on `mode`. x rows with
// pre_active[i] == 0 are skipped. When every active row equals one common
// kernel, passing it as `common_psp` selects the delay-bucketed fast
// path. Exposed separately because the adjoint test pairs it with
// layer_backprop_error.
void layer_drive(const Matrix& weights, const DelayMatrix& delays,
                 std::span<const double> pre_psp,
                 std::span<const std::uint8_t> pre_active, int steps,
                 std::span<double> drive,
                 DelayForward mode = DelayForward::quantized,
                 const std::vector<double>* common_psp = nullptr);

}  // namespace detail

}  // namespace delaynet
