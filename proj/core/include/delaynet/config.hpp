#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "delaynet/network.hpp"
#include "delaynet/optimizer.hpp"
#include "delaynet/signal.hpp"
#include "delaynet/srm.hpp"

namespace delaynet {

// Everything a training run needs, loadable from a flat key = value file
// (one pair per line, # comments) with every key also available as a CLI
// flag that overrides the file.
struct RunConfig {
  std::string dataset = "mnist";  // mnist | fashion-mnist (label for reports)
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  TrainMode mode = TrainMode::delays_only_free_weights;
  int epochs = 100;
  double lr = 0.01;
  int batch_size = 32;
  std::uint64_t seed = 1;
  double surrogate_alpha = 1.0;
  double surrogate_beta = 1.0;  // 1/mV
  TimeGrid grid{1.0, 10};
  SrmConfig srm{10.0, 1.0, 1.0};
  std::vector<int> hidden{800};
  double train_fraction = 0.8;
  int train_limit = 0;  // 0 = use the full train file; else first N samples
  double delay_init_max_ms = 1.0;
  double d_max_ms = -1.0;  // < 0 -> simulation window duration
  // Training-pass delay application. Validation, evaluation and inference
  // always floor-quantize; training defaults to the same thing so there is
  // no train/inference mismatch (the fractional option shades PSPs between
  // neighboring shifts instead).
  DelayForward train_delay_forward = DelayForward::quantized;
  // Stencil for the PSP time derivative inside the delay gradient. The
  // upwind stencil is exact over a delayed PSP's silent onset; the central
  // one manufactures spurious onset gradient that measurably derails
  // delay-only training (see delay.hpp).
  DerivativeStencil delay_gradient_stencil = DerivativeStencil::upwind;
  std::string out_dir = "runs/out";
  std::string resume;  // checkpoint path to continue from

  double effective_d_max() const {
    return d_max_ms < 0.0 ? grid.duration_ms() : d_max_ms;
  }
  void validate_for_train() const;
};

// Parse a flat config file. Unknown keys are configuration errors.
RunConfig load_config_file(const std::string& path);

// Apply one key = value pair (the CLI override path).
void apply_config_kv(RunConfig& cfg, const std::string& key,
                     const std::string& value);

// Full round-trippable echo of a config, in the file format.
std::string serialize_config(const RunConfig& cfg);

RunConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace delaynet
