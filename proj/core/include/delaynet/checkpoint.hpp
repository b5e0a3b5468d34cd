#pragma once

#include <string>
#include <vector>

#include "delaynet/config.hpp"
#include "delaynet/network.hpp"
#include "delaynet/optimizer.hpp"

namespace delaynet {

// Little-endian binary snapshot of a training run: 8-byte magic, format
// version, the config echo, then length-prefixed per-layer weight and
// real-valued delay arrays in declared layer order, the Adam state, epoch
// counters and the shuffle RNG state. Loading and continuing reproduces
// the uninterrupted run bit-exactly.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::string config_text;
  std::vector<LayerParams> layers;
  AdamState adam;
  int epoch = 0;          // last completed epoch
  double val_acc = 0.0;   // validation accuracy at that epoch
  double best_val_acc = 0.0;
  int best_epoch = 0;
  std::string rng_state;  // shuffle RNG, serialized

  RunConfig config() const { return parse_config_text(config_text, "checkpoint"); }
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace delaynet
