#include "delaynet/trainer.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "delaynet/gradient.hpp"
#include "delaynet/loss.hpp"

namespace delaynet {

namespace {

constexpr int kNumClasses = 10;

// Reusable per-sample machinery shared by training and evaluation.
struct SampleContext {
  TimeGrid grid;
  SrmConfig srm;
  KernelTable kernels;
  std::vector<double> target_psp;      // eps convolved with the all-ones train
  std::vector<SpikeTrain> input;       // reused input trains
  std::vector<int> prev_active;
  ForwardTrace trace;
  std::vector<double> error;           // kNumClasses x steps

  SampleContext(const TimeGrid& g, const SrmConfig& s, int input_size)
      : grid(g), srm(s), kernels(eval_kernels(s, g)) {
    SpikeTrain ones = SpikeTrain::empty(g);
    std::fill(ones.counts.begin(), ones.counts.end(), 1);
    target_psp = convolve_causal(kernels.eps, ones).values;
    input.assign(static_cast<std::size_t>(input_size), SpikeTrain::empty(g));
    error.assign(static_cast<std::size_t>(kNumClasses) * g.steps, 0.0);
  }

  void set_input(std::span<const int> actives) {
    for (int i : prev_active) input[static_cast<std::size_t>(i)].counts[0] = 0;
    prev_active.assign(actives.begin(), actives.end());
    for (int i : actives) input[static_cast<std::size_t>(i)].counts[0] = 1;
  }

  // Runs the forward pass and the loss; leaves the trace and the error
  // signals behind for an optional backward pass.
  double run(std::span<const LayerParams> params, std::span<const int> actives,
             int label, int* predicted,
             DelayForward mode = DelayForward::quantized) {
    set_input(actives);
    forward(params, input, kernels, srm, trace, mode);
    const LayerTrace& out = trace.layers.back();
    double loss = detail::loss_error_flat(out.spikes, out.post, grid.steps, label,
                                          kernels.eps.values, target_psp,
                                          grid.dt_ms, error);
    if (predicted) {
      *predicted = detail::decode_flat(out.spikes, out.post, grid.steps);
    }
    return loss;
  }
};

std::vector<std::vector<int>> encode_all(const Dataset& data) {
  std::vector<std::vector<int>> actives(data.samples.size());
  for (std::size_t n = 0; n < data.samples.size(); ++n) {
    detail::active_pixels(data.samples[n], actives[n]);
  }
  return actives;
}

Dataset load_train_data(const RunConfig& cfg) {
  Dataset data = load_idx(cfg.train_images, cfg.train_labels);
  require(data.size() > 0, ErrorKind::ingestion, "train dataset is empty");
  if (cfg.train_limit > 0 && cfg.train_limit < data.size()) {
    data.samples.resize(static_cast<std::size_t>(cfg.train_limit));
  }
  return data;
}

std::vector<LayerParams> build_network(const RunConfig& cfg, int input_size) {
  NetworkConfig net;
  net.layer_sizes.clear();
  net.layer_sizes.push_back(input_size);
  for (int h : cfg.hidden) net.layer_sizes.push_back(h);
  net.layer_sizes.push_back(kNumClasses);
  net.srm = cfg.srm;
  net.grid = cfg.grid;
  net.seed = cfg.seed;
  net.ternary_weights = cfg.mode == TrainMode::delays_only_ternary_weights;
  net.delay_init_max_ms = cfg.delay_init_max_ms;
  net.d_max_ms = cfg.effective_d_max();
  std::vector<LayerParams> params = init_network(net);
  bool frozen = cfg.mode != TrainMode::weights_baseline;
  for (LayerParams& layer : params) layer.weights_frozen = frozen;
  return params;
}

std::map<std::string, std::string> config_kv_map(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto strip = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
    };
    strip(key);
    strip(value);
    kv[key] = value;
  }
  return kv;
}

void check_resume_compatible(const RunConfig& cfg, const std::string& ck_text) {
  static const char* kMutable[] = {"out_dir", "epochs", "resume",
                                   "test_images", "test_labels"};
  auto now = config_kv_map(serialize_config(cfg));
  auto then = config_kv_map(ck_text);
  for (const char* k : kMutable) {
    now.erase(k);
    then.erase(k);
  }
  require(now == then, ErrorKind::config,
          "resume: checkpoint was trained with a different configuration");
}

Checkpoint make_checkpoint(const RunConfig& cfg,
                           const std::vector<LayerParams>& params,
                           const AdamState& adam, int epoch, double val_acc,
                           double best_val_acc, int best_epoch,
                           const Rng& shuffle_rng) {
  Checkpoint ck;
  ck.config_text = serialize_config(cfg);
  ck.layers = params;
  ck.adam = adam;
  ck.epoch = epoch;
  ck.val_acc = val_acc;
  ck.best_val_acc = best_val_acc;
  ck.best_epoch = best_epoch;
  ck.rng_state = shuffle_rng.save_state();
  return ck;
}

}  // namespace

std::string metrics_csv_header() {
  return "epoch,train_loss,train_acc,val_loss,val_acc,seconds";
}

std::string format_metrics_row(const EpochMetrics& m) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g,%.10g,%.3f", m.epoch,
                m.train_loss, m.train_acc, m.val_loss, m.val_acc, m.seconds);
  return buf;
}

TrainResult train_run(const RunConfig& cfg, std::ostream* log) {
  cfg.validate_for_train();
  Dataset data = load_train_data(cfg);
  std::vector<std::vector<int>> actives = encode_all(data);
  int input_size = data.pixel_count();

  std::vector<LayerParams> params;
  AdamState adam;
  adam.lr = cfg.lr;
  Rng shuffle_rng(splitmix64(cfg.seed ^ 0x53485546ull));  // "SHUF"
  int start_epoch = 0;
  double best_val_acc = -1.0;
  int best_epoch = 0;

  if (!cfg.resume.empty()) {
    Checkpoint ck = load_checkpoint(cfg.resume);
    check_resume_compatible(cfg, ck.config_text);
    require(!ck.layers.empty() && ck.layers.front().pre() == input_size,
            ErrorKind::config, "resume: checkpoint input size does not match data");
    params = std::move(ck.layers);
    adam = std::move(ck.adam);
    start_epoch = ck.epoch;
    best_val_acc = ck.best_val_acc;
    best_epoch = ck.best_epoch;
    shuffle_rng.restore_state(ck.rng_state);
  } else {
    params = build_network(cfg, input_size);
  }

  auto param_views = trainable_params(params, cfg.mode);
  if (!adam.initialized()) {
    adam.init_like(param_views);
  }

  GradientSet grads;
  grads.init_like(params);
  BackwardScratch scratch;
  SampleContext ctx(cfg.grid, cfg.srm, input_size);
  SurrogateConfig surrogate{cfg.surrogate_alpha, cfg.surrogate_beta};
  surrogate.validate();
  bool train_delays = delays_trained(cfg.mode);

  SplitBatcher batcher(data.size(), SplitSpec{cfg.train_fraction, cfg.seed});
  if (start_epoch > 0) {
    // The train order is the composition of every epoch's shuffle, so a
    // resumed run replays them; ending up in the checkpoint's RNG state
    // confirms the replay walked the same path.
    Rng replay_rng(splitmix64(cfg.seed ^ 0x53485546ull));
    for (int e = 0; e < start_epoch; ++e) batcher.shuffle_train(replay_rng);
    require(replay_rng.save_state() == shuffle_rng.save_state(),
            ErrorKind::ingestion,
            "resume: checkpoint RNG state does not match the replayed epochs");
  }

  std::filesystem::create_directories(cfg.out_dir);
  TrainResult result;
  result.metrics_path = cfg.out_dir + "/metrics.csv";
  result.best_checkpoint_path = cfg.out_dir + "/best.ckpt";
  result.last_checkpoint_path = cfg.out_dir + "/last.ckpt";
  if (!cfg.resume.empty() && !std::filesystem::exists(result.best_checkpoint_path)) {
    // Resuming into a fresh directory: the best-so-far parameters live
    // next to the checkpoint we are resuming from, so carry them over;
    // later epochs overwrite on improvement.
    std::filesystem::path neighbor =
        std::filesystem::path(cfg.resume).parent_path() / "best.ckpt";
    if (std::filesystem::exists(neighbor)) {
      std::filesystem::copy_file(neighbor, result.best_checkpoint_path);
    }
  }
  std::ofstream metrics(result.metrics_path, std::ios::trunc);
  require(metrics.good(), ErrorKind::ingestion,
          result.metrics_path + ": cannot open for write");
  metrics << metrics_csv_header() << "\n";
  metrics.flush();

  for (int epoch = start_epoch + 1; epoch <= cfg.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    batcher.shuffle_train(shuffle_rng);

    double train_loss_sum = 0.0;
    int train_correct = 0;
    int train_total = 0;
    for (std::span<const int> batch : batcher.train_batches(cfg.batch_size)) {
      grads.zero();
      for (int idx : batch) {
        const ImageSample& sample = data.samples[static_cast<std::size_t>(idx)];
        int predicted = Prediction::kNone;
        double loss = ctx.run(params, actives[static_cast<std::size_t>(idx)],
                              sample.label, &predicted, cfg.train_delay_forward);
        backward_accumulate(ctx.trace, params, ctx.kernels, cfg.srm, surrogate,
                            ctx.error, grads, scratch, train_delays,
                            cfg.delay_gradient_stencil);
        train_loss_sum += loss;
        train_correct += predicted == sample.label ? 1 : 0;
        ++train_total;
      }
      grads.scale(1.0 / static_cast<double>(batch.size()));
      auto grad_views = trainable_grads(grads, cfg.mode);
      adam_step(adam, param_views, grad_views);
      constrain(params, cfg.mode, cfg.effective_d_max());
    }

    double val_loss_sum = 0.0;
    int val_correct = 0;
    int val_total = 0;
    for (int idx : batcher.val_indices()) {
      const ImageSample& sample = data.samples[static_cast<std::size_t>(idx)];
      int predicted = Prediction::kNone;
      val_loss_sum += ctx.run(params, actives[static_cast<std::size_t>(idx)],
                              sample.label, &predicted);
      val_correct += predicted == sample.label ? 1 : 0;
      ++val_total;
    }

    auto t1 = std::chrono::steady_clock::now();
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = train_total ? train_loss_sum / train_total : 0.0;
    m.train_acc = train_total ? static_cast<double>(train_correct) / train_total : 0.0;
    m.val_loss = val_total ? val_loss_sum / val_total : 0.0;
    m.val_acc = val_total ? static_cast<double>(val_correct) / val_total : 0.0;
    m.seconds = std::chrono::duration<double>(t1 - t0).count();
    result.history.push_back(m);
    metrics << format_metrics_row(m) << "\n";
    metrics.flush();
    if (log) {
      (*log) << "epoch " << m.epoch << ": train_loss=" << m.train_loss
             << " train_acc=" << m.train_acc << " val_loss=" << m.val_loss
             << " val_acc=" << m.val_acc << " (" << m.seconds << "s)"
             << std::endl;
    }

    bool is_best = m.val_acc > best_val_acc;
    if (is_best) {
      best_val_acc = m.val_acc;
      best_epoch = epoch;
    }
    Checkpoint ck = make_checkpoint(cfg, params, adam, epoch, m.val_acc,
                                    best_val_acc, best_epoch, shuffle_rng);
    save_checkpoint(result.last_checkpoint_path, ck);
    if (is_best) {
      save_checkpoint(result.best_checkpoint_path, ck);
    }
  }

  result.best_val_acc = best_val_acc;
  result.best_epoch = best_epoch;
  return result;
}

EvalReport evaluate_checkpoint(const Checkpoint& ck, const Dataset& data) {
  RunConfig cfg = ck.config();
  require(!ck.layers.empty() && ck.layers.front().pre() == data.pixel_count(),
          ErrorKind::config, "evaluate: checkpoint input size does not match data");
  SampleContext ctx(cfg.grid, cfg.srm, data.pixel_count());
  EvalReport report;
  std::vector<int> act;
  for (const ImageSample& sample : data.samples) {
    detail::active_pixels(sample, act);
    int predicted = Prediction::kNone;
    report.mean_loss += ctx.run(ck.layers, act, sample.label, &predicted);
    if (predicted == Prediction::kNone) ++report.silent;
    if (predicted == sample.label) ++report.correct;
    ++report.total;
  }
  if (report.total > 0) {
    report.accuracy = static_cast<double>(report.correct) / report.total;
    report.mean_loss /= report.total;
  }
  return report;
}

EvalReport evaluate_checkpoint_files(const std::string& checkpoint_path,
                                     const std::string& images_path,
                                     const std::string& labels_path) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  Dataset data = load_idx(images_path, labels_path);
  return evaluate_checkpoint(ck, data);
}

std::string inspect_report(const Checkpoint& ck) {
  RunConfig cfg = ck.config();
  std::ostringstream os;
  os << "mode: " << to_string(cfg.mode) << "\n";
  os << "epoch: " << ck.epoch << " (val_acc " << ck.val_acc << ", best "
     << ck.best_val_acc << " at epoch " << ck.best_epoch << ")\n";
  for (std::size_t l = 0; l < ck.layers.size(); ++l) {
    const LayerParams& layer = ck.layers[l];
    os << "layer " << l << ": " << layer.pre() << " -> " << layer.post() << "\n";

    int max_q = quantize_delay(layer.delays.d_max_ms(), cfg.grid);
    std::vector<std::size_t> hist(static_cast<std::size_t>(max_q) + 1, 0);
    for (std::uint8_t q : layer.delays.quantized()) {
      ++hist[static_cast<std::size_t>(q)];
    }
    os << "  delay steps:";
    for (std::size_t q = 0; q < hist.size(); ++q) {
      os << " " << q << ":" << hist[q];
    }
    os << "\n";

    if (layer.weights_ternary) {
      std::size_t neg = 0, zero = 0, pos = 0;
      for (double w : layer.weights.flat()) {
        if (w < 0.0) ++neg;
        else if (w > 0.0) ++pos;
        else ++zero;
      }
      os << "  weights (ternary): -:" << neg << " 0:" << zero << " +:" << pos
         << "\n";
    } else {
      double mn = layer.weights.flat()[0];
      double mx = mn;
      double sum = 0.0;
      for (double w : layer.weights.flat()) {
        mn = std::min(mn, w);
        mx = std::max(mx, w);
        sum += w;
      }
      os << "  weights: min=" << mn
         << " mean=" << sum / static_cast<double>(layer.weights.size())
         << " max=" << mx << "\n";
    }
  }
  return os.str();
}

}  // namespace delaynet
