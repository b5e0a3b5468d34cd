#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "delaynet/checkpoint.hpp"
#include "delaynet/config.hpp"
#include "delaynet/dataset.hpp"

namespace delaynet {

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> history;
  double best_val_acc = 0.0;
  int best_epoch = 0;
  std::string metrics_path;
  std::string best_checkpoint_path;
  std::string last_checkpoint_path;
};

// Full training run: per epoch, one pass over the train split followed by
// a validation pass; appends one metrics CSV row per epoch and keeps the
// best-validation and last checkpoints in cfg.out_dir. Deterministic
// under cfg.seed. Set cfg.resume to continue from a saved checkpoint.
TrainResult train_run(const RunConfig& cfg, std::ostream* log = nullptr);

struct EvalReport {
  int total = 0;
  int correct = 0;
  int silent = 0;  // samples whose output layer never spiked
  double accuracy = 0.0;
  double mean_loss = 0.0;
};

EvalReport evaluate_checkpoint(const Checkpoint& ck, const Dataset& data);
EvalReport evaluate_checkpoint_files(const std::string& checkpoint_path,
                                     const std::string& images_path,
                                     const std::string& labels_path);

// Per-layer quantized-delay histogram and weight summary.
std::string inspect_report(const Checkpoint& ck);

std::string metrics_csv_header();
std::string format_metrics_row(const EpochMetrics& m);

}  // namespace delaynet
