#include "delaynet/network.hpp"

#include <cmath>

namespace delaynet {

void NetworkConfig::validate() const {
  require(layer_sizes.size() >= 2, ErrorKind::config,
          "NetworkConfig: need at least input and output layer sizes");
  for (int n : layer_sizes) {
    require(n >= 1, ErrorKind::config, "NetworkConfig: layer sizes must be positive");
  }
  grid.validate();
  srm.validate();
  require(delay_init_max_ms >= 0.0 && delay_init_max_ms <= effective_d_max(),
          ErrorKind::config, "NetworkConfig: delay_init_max out of range");
  if (!weight_init.empty()) {
    require(static_cast<int>(weight_init.size()) == synaptic_layers(),
            ErrorKind::config,
            "NetworkConfig: weight_init must have one entry per synaptic layer");
  } else {
    require(synaptic_layers() == 2, ErrorKind::config,
            "NetworkConfig: built-in weight init is defined for the "
            "two-synaptic-layer architecture; pass weight_init explicitly");
  }
}

double ternary_round(double w) {
  if (w >= 0.5) return 1.0;
  if (w <= -0.5) return -1.0;
  return 0.0;
}

std::vector<LayerParams> init_network(const NetworkConfig& cfg) {
  cfg.validate();
  std::vector<WeightInit> init = cfg.weight_init;
  if (init.empty()) {
    init = {{0.0571, 0.5458, 10.0}, {-0.5244, 1.0490, 10.0}};
  }

  Rng rng(cfg.seed);
  std::vector<LayerParams> params;
  params.reserve(init.size());
  for (int l = 0; l < cfg.synaptic_layers(); ++l) {
    int pre = cfg.layer_sizes[static_cast<std::size_t>(l)];
    int post = cfg.layer_sizes[static_cast<std::size_t>(l) + 1];
    LayerParams layer{Matrix(post, pre), DelayMatrix(post, pre, cfg.effective_d_max(), cfg.grid),
                      /*weights_frozen=*/true, /*weights_ternary=*/cfg.ternary_weights};
    const WeightInit& wi = init[static_cast<std::size_t>(l)];
    for (double& w : layer.weights.flat()) {
      double draw = rng.normal(wi.mean, wi.stddev);
      if (cfg.ternary_weights) draw = ternary_round(draw);
      w = draw * wi.scale;
    }
    for (double& d : layer.delays.mutable_values()) {
      d = rng.uniform(0.0, cfg.delay_init_max_ms);
    }
    layer.delays.clamp_and_requantize();
    params.push_back(std::move(layer));
  }
  return params;
}

Signal ForwardTrace::membrane_of(int layer, int j) const {
  const LayerTrace& lt = layers[static_cast<std::size_t>(layer)];
  Signal s = Signal::zeros(grid);
  auto row = lt.membrane_row(j);
  std::copy(row.begin(), row.end(), s.values.begin());
  return s;
}

SpikeTrain ForwardTrace::spikes_of(int layer, int j) const {
  const LayerTrace& lt = layers[static_cast<std::size_t>(layer)];
  SpikeTrain t = SpikeTrain::empty(grid);
  auto row = lt.spike_row(j);
  for (int k = 0; k < lt.steps; ++k) t.counts[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k)];
  return t;
}

std::vector<SpikeTrain> ForwardTrace::output_trains() const {
  const LayerTrace& last = layers.back();
  std::vector<SpikeTrain> out;
  out.reserve(static_cast<std::size_t>(last.post));
  for (int j = 0; j < last.post; ++j) {
    out.push_back(spikes_of(static_cast<int>(layers.size()) - 1, j));
  }
  return out;
}

Signal synapse_psp(const ForwardTrace& trace, std::span<const LayerParams> params,
                   int l, int j_post, int i_pre) {
  const LayerTrace& lt = trace.layers[static_cast<std::size_t>(l)];
  const DelayMatrix& delays = params[static_cast<std::size_t>(l)].delays;
  int q = delays.quantized_at(j_post, i_pre);
  Signal a = Signal::zeros(trace.grid);
  auto x = lt.psp_row(i_pre);
  if (trace.delay_mode == DelayForward::fractional) {
    double f = delays.fraction()[static_cast<std::size_t>(i_pre) * delays.post() +
                                 static_cast<std::size_t>(j_post)];
    for (int k = q; k < lt.steps; ++k) {
      double lo = x[static_cast<std::size_t>(k - q)];
      double hi = k - q - 1 >= 0 ? x[static_cast<std::size_t>(k - q - 1)] : 0.0;
      a[k] = (1.0 - f) * lo + f * hi;
    }
  } else {
    for (int k = q; k < lt.steps; ++k) {
      a[k] = x[static_cast<std::size_t>(k - q)];
    }
  }
  return a;
}

namespace {

void resize_trace(ForwardTrace& trace, std::span<const LayerParams> params,
                  const TimeGrid& grid) {
  trace.grid = grid;
  trace.layers.resize(params.size());
  int steps = grid.steps;
  for (std::size_t l = 0; l < params.size(); ++l) {
    LayerTrace& lt = trace.layers[l];
    lt.pre = params[l].pre();
    lt.post = params[l].post();
    lt.steps = steps;
    lt.pre_psp.assign(static_cast<std::size_t>(lt.pre) * steps, 0.0);
    lt.pre_active.assign(static_cast<std::size_t>(lt.pre), 0);
    lt.membrane.assign(static_cast<std::size_t>(lt.post) * steps, 0.0);
    lt.spikes.assign(static_cast<std::size_t>(lt.post) * steps, 0);
  }
  trace.input_counts.assign(static_cast<std::size_t>(params[0].pre()) * steps, 0);
}

}  // namespace

void forward(std::span<const LayerParams> params, std::span<const SpikeTrain> input,
             const KernelTable& kernels, const SrmConfig& srm, ForwardTrace& trace,
             DelayForward delay_mode) {
  require(!params.empty(), ErrorKind::config, "forward: no layers");
  const TimeGrid& grid = kernels.eps.grid;
  require(static_cast<int>(input.size()) == params[0].pre(), ErrorKind::config,
          "forward: input size does not match first layer");
  for (const SpikeTrain& t : input) {
    require(t.grid == grid, ErrorKind::config, "forward: input train grid mismatch");
  }
  resize_trace(trace, params, grid);
  trace.delay_mode = delay_mode;

  int steps = grid.steps;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const std::vector<int>& c = input[i].counts;
    std::copy(c.begin(), c.end(),
              trace.input_counts.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(steps)));
  }

  for (std::size_t l = 0; l < params.size(); ++l) {
    LayerTrace& lt = trace.layers[l];

    // PSP of each presynaptic train: x_i = eps * s_i.
    bool common = true;
    for (int i = 0; i < lt.pre; ++i) {
      std::span<double> x{lt.pre_psp.data() + static_cast<std::size_t>(i) * steps,
                          static_cast<std::size_t>(steps)};
      bool active = false;
      if (l == 0) {
        const std::vector<int>& c = input[static_cast<std::size_t>(i)].counts;
        for (int m = 0; m < steps; ++m) {
          if (c[static_cast<std::size_t>(m)] != 0) {
            detail::add_shifted_kernel(kernels.eps.values, m,
                                       c[static_cast<std::size_t>(m)], x);
            active = true;
            if (m != 0 || c[static_cast<std::size_t>(m)] != 1) common = false;
          }
        }
      } else {
        auto s = trace.layers[l - 1].spike_row(i);
        for (int m = 0; m < steps; ++m) {
          if (s[static_cast<std::size_t>(m)]) {
            detail::add_shifted_kernel(kernels.eps.values, m, 1.0, x);
            active = true;
            if (m != 0) common = false;
          }
        }
      }
      lt.pre_active[static_cast<std::size_t>(i)] = active ? 1 : 0;
    }
    lt.common_input_psp = common;

    detail::layer_drive(params[l].weights, params[l].delays, lt.pre_psp,
                        lt.pre_active, steps, lt.membrane, delay_mode,
                        common ? &kernels.eps.values : nullptr);

    for (int j = 0; j < lt.post; ++j) {
      std::span<double> u{lt.membrane.data() + static_cast<std::size_t>(j) * steps,
                          static_cast<std::size_t>(steps)};
      std::span<std::uint8_t> s{lt.spikes.data() + static_cast<std::size_t>(j) * steps,
                                static_cast<std::size_t>(steps)};
      detail::simulate_neuron_span(u, kernels.nu.values, srm.threshold_mv, s, u);
    }
  }
}

ForwardTrace forward(std::span<const LayerParams> params,
                     std::span<const SpikeTrain> input,
                     const KernelTable& kernels, const SrmConfig& srm,
                     DelayForward delay_mode) {
  ForwardTrace trace;
  forward(params, input, kernels, srm, trace, delay_mode);
  return trace;
}

namespace detail {

void layer_drive(const Matrix& weights, const DelayMatrix& delays,
                 std::span<const double> pre_psp,
                 std::span<const std::uint8_t> pre_active, int steps,
                 std::span<double> drive, DelayForward mode,
                 const std::vector<double>* common_psp) {
  int pre = weights.pre();
  int post = weights.post();
  bool fractional = mode == DelayForward::fractional;
  std::fill(drive.begin(), drive.end(), 0.0);

  if (common_psp) {
    // Every active PSP row is the same kernel, so first bucket the
    // weights by integer delay per postsynaptic neuron, then lay the
    // kernel down once per bucket.
    int buckets = steps + 2;  // q can reach `steps`, fractional taps q + 1
    thread_local std::vector<double> bucketed;
    bucketed.assign(static_cast<std::size_t>(post) * buckets, 0.0);
    for (int i = 0; i < pre; ++i) {
      if (!pre_active[static_cast<std::size_t>(i)]) continue;
      auto w_col = weights.column(i);
      auto q_col = delays.quantized_column(i);
      auto f_col = delays.fraction_column(i);
      for (int j = 0; j < post; ++j) {
        double w = w_col[static_cast<std::size_t>(j)];
        if (w == 0.0) continue;
        std::size_t base = static_cast<std::size_t>(j) * buckets +
                           q_col[static_cast<std::size_t>(j)];
        if (fractional) {
          double f = f_col[static_cast<std::size_t>(j)];
          bucketed[base] += w * (1.0 - f);
          bucketed[base + 1] += w * f;
        } else {
          bucketed[base] += w;
        }
      }
    }
    for (int j = 0; j < post; ++j) {
      std::span<double> out{drive.data() + static_cast<std::size_t>(j) * steps,
                            static_cast<std::size_t>(steps)};
      const double* b = bucketed.data() + static_cast<std::size_t>(j) * buckets;
      for (int q = 0; q < steps; ++q) {
        if (b[q] != 0.0) add_shifted_kernel(*common_psp, q, b[q], out);
      }
    }
    return;
  }

  for (int i = 0; i < pre; ++i) {
    if (!pre_active[static_cast<std::size_t>(i)]) continue;
    const double* x = pre_psp.data() + static_cast<std::size_t>(i) * steps;
    auto w_col = weights.column(i);
    auto q_col = delays.quantized_column(i);
    auto f_col = delays.fraction_column(i);
    for (int j = 0; j < post; ++j) {
      double w = w_col[static_cast<std::size_t>(j)];
      if (w == 0.0) continue;
      int q = q_col[static_cast<std::size_t>(j)];
      double* out = drive.data() + static_cast<std::size_t>(j) * steps;
      if (fractional) {
        double f = f_col[static_cast<std::size_t>(j)];
        double w_lo = w * (1.0 - f);
        double w_hi = w * f;
        for (int k = q; k < steps; ++k) {
          out[k] += w_lo * x[k - q];
        }
        if (w_hi != 0.0) {
          for (int k = q + 1; k < steps; ++k) {
            out[k] += w_hi * x[k - q - 1];
          }
        }
      } else {
        for (int k = q; k < steps; ++k) {
          out[k] += w * x[k - q];
        }
      }
    }
  }
}

}  // namespace detail

}  // namespace delaynet
