// delaynet CLI: train / eval / inspect / sweep over the delay-training
// spiking network engine.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "delaynet/checkpoint.hpp"
#include "delaynet/trainer.hpp"

namespace {

int exit_code_for(const delaynet::Error& e) {
  switch (e.kind()) {
    case delaynet::ErrorKind::ingestion: return 2;
    case delaynet::ErrorKind::numeric: return 3;
    default: return 1;  // usage / config / contract / input
  }
}

struct Overrides {
  std::vector<std::pair<std::string, std::string>> kv;

  void add_option(CLI::App* cmd, const std::string& flag, const std::string& key,
                  const std::string& help) {
    auto value = std::make_shared<std::string>();
    cmd->add_option_function<std::string>(
        flag,
        [this, key, value](const std::string& v) { kv.emplace_back(key, v); },
        help);
  }
};

delaynet::RunConfig resolve_config(const std::string& config_path,
                                   const Overrides& overrides) {
  delaynet::RunConfig cfg;
  if (!config_path.empty()) {
    cfg = delaynet::load_config_file(config_path);
  }
  for (const auto& [key, value] : overrides.kv) {
    delaynet::apply_config_kv(cfg, key, value);
  }
  return cfg;
}

void print_eval_report(const delaynet::EvalReport& r) {
  std::printf("samples: %d\n", r.total);
  std::printf("correct: %d\n", r.correct);
  std::printf("silent:  %d\n", r.silent);
  std::printf("accuracy: %.4f\n", r.accuracy);
  std::printf("mean_loss: %.6f\n", r.mean_loss);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiking network engine that trains per-synapse delays"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;

  CLI::App* train = app.add_subcommand("train", "train a network, write metrics CSV and checkpoints");
  train->add_option("--config", config_path, "flat key = value config file");
  overrides.add_option(train, "--dataset", "dataset", "mnist | fashion-mnist");
  overrides.add_option(train, "--mode", "mode",
                       "delays-free | delays-ternary | weights-baseline");
  overrides.add_option(train, "--epochs", "epochs", "training epochs");
  overrides.add_option(train, "--seed", "seed", "RNG seed");
  overrides.add_option(train, "--out", "out_dir", "output directory");
  overrides.add_option(train, "--images", "train_images", "train images IDX file");
  overrides.add_option(train, "--labels", "train_labels", "train labels IDX file");
  overrides.add_option(train, "--lr", "lr", "Adam learning rate");
  overrides.add_option(train, "--batch-size", "batch_size", "batch size");
  overrides.add_option(train, "--hidden", "hidden", "hidden layer sizes, comma separated");
  overrides.add_option(train, "--alpha", "surrogate_alpha", "surrogate scale");
  overrides.add_option(train, "--beta", "surrogate_beta", "surrogate sharpness (1/mV)");
  overrides.add_option(train, "--train-limit", "train_limit",
                       "use only the first N train samples (0 = all)");
  overrides.add_option(train, "--train-delay-forward", "train_delay_forward",
                       "fractional | quantized delay application while training");
  overrides.add_option(train, "--delay-gradient-stencil", "delay_gradient_stencil",
                       "central | upwind PSP derivative in the delay gradient");
  overrides.add_option(train, "--resume", "resume", "checkpoint to continue from");

  std::string ckpt_path, eval_images, eval_labels;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on an IDX pair");
  eval->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  eval->add_option("--images", eval_images, "images IDX file")->required();
  eval->add_option("--labels", eval_labels, "labels IDX file")->required();

  std::string inspect_path;
  CLI::App* inspect = app.add_subcommand("inspect", "summarize a checkpoint's delays and weights");
  inspect->add_option("--checkpoint", inspect_path, "checkpoint file")->required();

  // Default grid spans the classic beta ~ 1/mV region and the flat end
  // that this architecture's large membrane excursions actually need.
  std::string alphas = "0.1,1,10";
  std::string betas = "0.01,0.03,0.1,0.3,1";
  CLI::App* sweep = app.add_subcommand(
      "sweep", "grid-search surrogate alpha/beta with short training runs");
  sweep->add_option("--config", config_path, "flat key = value config file");
  sweep->add_option("--alphas", alphas, "comma-separated alpha grid");
  sweep->add_option("--betas", betas, "comma-separated beta grid");
  overrides.add_option(sweep, "--epochs", "epochs", "epochs per grid point");
  overrides.add_option(sweep, "--out", "out_dir", "output directory");
  overrides.add_option(sweep, "--images", "train_images", "train images IDX file");
  overrides.add_option(sweep, "--labels", "train_labels", "train labels IDX file");
  overrides.add_option(sweep, "--train-limit", "train_limit",
                       "use only the first N train samples (0 = all)");
  overrides.add_option(sweep, "--seed", "seed", "RNG seed");
  overrides.add_option(sweep, "--mode", "mode", "training mode");
  overrides.add_option(sweep, "--lr", "lr", "Adam learning rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Normalize CLI11's exit codes onto the documented contract:
    // 0 = help output, 1 = any usage error.
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) {
      delaynet::RunConfig cfg = resolve_config(config_path, overrides);
      delaynet::TrainResult result = delaynet::train_run(cfg, &std::cout);
      std::printf("best val_acc %.4f at epoch %d\n", result.best_val_acc,
                  result.best_epoch);
      std::printf("metrics: %s\n", result.metrics_path.c_str());
      std::printf("best checkpoint: %s\n", result.best_checkpoint_path.c_str());
      return 0;
    }
    if (eval->parsed()) {
      delaynet::EvalReport r =
          delaynet::evaluate_checkpoint_files(ckpt_path, eval_images, eval_labels);
      print_eval_report(r);
      return 0;
    }
    if (inspect->parsed()) {
      delaynet::Checkpoint ck = delaynet::load_checkpoint(inspect_path);
      std::cout << delaynet::inspect_report(ck);
      return 0;
    }
    if (sweep->parsed()) {
      delaynet::RunConfig base = resolve_config(config_path, overrides);
      auto parse_list = [](const std::string& s) {
        std::vector<double> out;
        std::size_t pos = 0;
        while (pos < s.size()) {
          std::size_t comma = s.find(',', pos);
          if (comma == std::string::npos) comma = s.size();
          out.push_back(std::stod(s.substr(pos, comma - pos)));
          pos = comma + 1;
        }
        return out;
      };
      std::string root = base.out_dir;
      std::printf("alpha,beta,best_val_acc,best_epoch\n");
      double best = -1.0, best_a = 0.0, best_b = 0.0;
      for (double a : parse_list(alphas)) {
        for (double b : parse_list(betas)) {
          delaynet::RunConfig cfg = base;
          cfg.surrogate_alpha = a;
          cfg.surrogate_beta = b;
          char sub[64];
          std::snprintf(sub, sizeof(sub), "/sweep_a%g_b%g", a, b);
          cfg.out_dir = root + sub;
          delaynet::TrainResult r = delaynet::train_run(cfg, nullptr);
          std::printf("%g,%g,%.4f,%d\n", a, b, r.best_val_acc, r.best_epoch);
          std::fflush(stdout);
          if (r.best_val_acc > best) {
            best = r.best_val_acc;
            best_a = a;
            best_b = b;
          }
        }
      }
      std::printf("best: alpha=%g beta=%g val_acc=%.4f\n", best_a, best_b, best);
      return 0;
    }
  } catch (const delaynet::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
