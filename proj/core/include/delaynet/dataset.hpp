#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "delaynet/rng.hpp"
#include "delaynet/signal.hpp"

namespace delaynet {

struct ImageSample {
  std::vector<std::uint8_t> pixels;  // row-major greyscale
  std::uint8_t label = 0;
};

struct Dataset {
  int rows = 0;
  int cols = 0;
  std::vector<ImageSample> samples;

  int pixel_count() const { return rows * cols; }
  int size() const { return static_cast<int>(samples.size()); }
};

// IDX pair loader (the standard MNIST distribution format): big-endian
// magic 0x00000803 + count/rows/cols for images, 0x00000801 + count for
// labels, then raw unsigned bytes. Ingestion errors name the offending
// file and byte offset.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Inverse of load_idx, for synthetic fixtures and subset generation.
void write_idx(const std::string& images_path, const std::string& labels_path,
               const Dataset& data);

// Threshold encoding: pixel > 127 becomes a single spike at step 0 on
// that input neuron, anything else an empty train.
std::vector<SpikeTrain> encode_threshold(const ImageSample& sample,
                                         const TimeGrid& grid);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

// Deterministic train/validation partition plus per-epoch reshuffling of
// the training order. The split is fixed by its own seed; reshuffles
// consume the Rng passed to shuffle_train so a resumed run continues the
// exact same batch sequence.
class SplitBatcher {
 public:
  SplitBatcher(int n_samples, const SplitSpec& spec);

  std::span<const int> train_indices() const { return train_; }
  std::span<const int> val_indices() const { return val_; }

  void shuffle_train(Rng& rng);

  // Contiguous batches over the current training order; the final partial
  // batch is included.
  std::vector<std::span<const int>> train_batches(int batch_size) const;

 private:
  std::vector<int> train_;
  std::vector<int> val_;
};

namespace detail {

// Indices of pixels that encode to a spike. The trainer's reusable input
// buffer is driven by this plus the rule that all spikes sit at step 0.
void active_pixels(const ImageSample& sample, std::vector<int>& out);

}  // namespace detail

}  // namespace delaynet
