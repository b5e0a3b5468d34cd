#include "delaynet/gradient.hpp"

#include <cmath>

namespace delaynet {

Signal spike_derivative(const Signal& u, const SurrogateConfig& cfg,
                        double threshold_mv) {
  cfg.validate();
  Signal out = Signal::zeros(u.grid);
  for (int k = 0; k < u.grid.steps; ++k) {
    out[k] = cfg.alpha * cfg.beta * std::exp(-cfg.beta * std::abs(u[k] - threshold_mv));
  }
  return out;
}

void GradientSet::init_like(std::span<const LayerParams> params) {
  weight_grad.clear();
  delay_grad.clear();
  for (const LayerParams& p : params) {
    weight_grad.emplace_back(p.post(), p.pre());
    delay_grad.emplace_back(p.post(), p.pre());
  }
}

void GradientSet::zero() {
  for (Matrix& m : weight_grad) m.fill(0.0);
  for (Matrix& m : delay_grad) m.fill(0.0);
}

void GradientSet::scale(double factor) {
  for (Matrix& m : weight_grad) {
    for (double& v : m.flat()) v *= factor;
  }
  for (Matrix& m : delay_grad) {
    for (double& v : m.flat()) v *= factor;
  }
}

void backward_accumulate(const ForwardTrace& trace,
                         std::span<const LayerParams> params,
                         const KernelTable& kernels, const SrmConfig& srm,
                         const SurrogateConfig& surrogate,
                         std::span<const double> output_error,
                         GradientSet& grads, BackwardScratch& scratch,
                         bool delay_grads, DerivativeStencil stencil) {
  require(trace.layers.size() == params.size(), ErrorKind::contract,
          "backward: trace does not match params");
  require(grads.weight_grad.size() == params.size(), ErrorKind::contract,
          "backward: gradient set does not match params");
  int steps = trace.grid.steps;
  double dt = trace.grid.dt_ms;
  const std::vector<double>& eps = kernels.eps.values;
  double alpha_beta = surrogate.alpha * surrogate.beta;
  double beta = surrogate.beta;
  double theta = srm.threshold_mv;

  const LayerTrace& out_layer = trace.layers.back();
  require(output_error.size() ==
              static_cast<std::size_t>(out_layer.post) * static_cast<std::size_t>(steps),
          ErrorKind::contract, "backward: error size does not match output layer");

  std::vector<double>& err = scratch.err_a;
  std::vector<double>& err_prev = scratch.err_b;
  err.assign(output_error.begin(), output_error.end());

  for (int l = static_cast<int>(params.size()) - 1; l >= 0; --l) {
    const LayerTrace& lt = trace.layers[static_cast<std::size_t>(l)];
    const LayerParams& lp = params[static_cast<std::size_t>(l)];
    std::size_t post_sz = static_cast<std::size_t>(lt.post) * steps;

    // delta_j(t) = e_j(t) * rho(u_j(t)), plus the derivative-stencil
    // adjoint of delta used by the delay gradients.
    scratch.delta.resize(post_sz);
    for (std::size_t n = 0; n < post_sz; ++n) {
      double rho = alpha_beta * std::exp(-beta * std::abs(lt.membrane[n] - theta));
      scratch.delta[n] = err[n] * rho;
    }
    if (delay_grads) {
      scratch.delta_dt_adjoint.resize(post_sz);
      for (int j = 0; j < lt.post; ++j) {
        std::span<const double> dj{scratch.delta.data() + static_cast<std::size_t>(j) * steps,
                                   static_cast<std::size_t>(steps)};
        std::span<double> out{scratch.delta_dt_adjoint.data() + static_cast<std::size_t>(j) * steps,
                              static_cast<std::size_t>(steps)};
        if (stencil == DerivativeStencil::central) {
          detail::time_derivative_adjoint_span(dj, dt, out);
        } else {
          detail::time_derivative_upwind_adjoint_span(dj, dt, out);
        }
      }
    }

    // Per-synapse gradients. a_ij is x_i delayed by d_ij, so the window
    // inner products reduce to offset dot products with x_i:
    //   sum_t a_ij(t) delta_j(t)    = sum_t x_i(t) delta_j(t + q)
    //   sum_t adot_ij(t) delta_j(t) = sum_t x_i(t) (D^T delta_j)(t + q)
    // blended over offsets q and q+1 when the trace used fractional
    // delays.
    bool fractional = trace.delay_mode == DelayForward::fractional;
    bool want_w = !lp.weights_frozen;
    Matrix& gw = grads.weight_grad[static_cast<std::size_t>(l)];
    Matrix& gd = grads.delay_grad[static_cast<std::size_t>(l)];

    if (lt.common_input_psp) {
      // Every active x_i is the eps kernel, so the offset dots collapse
      // into per-neuron tables over the delay offset, and the synapse
      // loop becomes lookups.
      int buckets = steps + 2;
      auto fill_table = [&](const std::vector<double>& rows, std::vector<double>& table) {
        table.assign(static_cast<std::size_t>(lt.post) * buckets, 0.0);
        for (int j = 0; j < lt.post; ++j) {
          const double* r = rows.data() + static_cast<std::size_t>(j) * steps;
          double* out = table.data() + static_cast<std::size_t>(j) * buckets;
          for (int q = 0; q < steps; ++q) {
            double acc = 0.0;
            for (int t = 0; t < steps - q; ++t) acc += eps[static_cast<std::size_t>(t)] * r[t + q];
            out[q] = acc;
          }
        }
      };
      if (want_w) fill_table(scratch.delta, scratch.delta_table);
      if (delay_grads) fill_table(scratch.delta_dt_adjoint, scratch.delta_dt_table);

      for (int i = 0; i < lt.pre; ++i) {
        if (!lt.pre_active[static_cast<std::size_t>(i)]) continue;
        auto w_col = lp.weights.column(i);
        auto q_col = lp.delays.quantized_column(i);
        auto f_col = lp.delays.fraction_column(i);
        auto gw_col = gw.column(i);
        auto gd_col = gd.column(i);
        for (int j = 0; j < lt.post; ++j) {
          int q = q_col[static_cast<std::size_t>(j)];
          double f = fractional ? f_col[static_cast<std::size_t>(j)] : 0.0;
          std::size_t base = static_cast<std::size_t>(j) * buckets + q;
          if (want_w) {
            const double* c = scratch.delta_table.data() + base;
            gw_col[static_cast<std::size_t>(j)] += dt * ((1.0 - f) * c[0] + f * c[1]);
          }
          if (delay_grads) {
            double w = w_col[static_cast<std::size_t>(j)];
            if (w != 0.0) {
              const double* c = scratch.delta_dt_table.data() + base;
              gd_col[static_cast<std::size_t>(j)] +=
                  -dt * w * ((1.0 - f) * c[0] + f * c[1]);
            }
          }
        }
      }
    } else {
      for (int i = 0; i < lt.pre; ++i) {
        if (!lt.pre_active[static_cast<std::size_t>(i)]) continue;
        const double* x = lt.pre_psp.data() + static_cast<std::size_t>(i) * steps;
        auto w_col = lp.weights.column(i);
        auto q_col = lp.delays.quantized_column(i);
        auto f_col = lp.delays.fraction_column(i);
        auto gw_col = gw.column(i);
        auto gd_col = gd.column(i);
        for (int j = 0; j < lt.post; ++j) {
          int q = q_col[static_cast<std::size_t>(j)];
          if (q >= steps) continue;
          double f = fractional ? f_col[static_cast<std::size_t>(j)] : 0.0;
          auto offset_dot = [&](const double* rows, int offset) {
            const double* r = rows + static_cast<std::size_t>(j) * steps + offset;
            double acc = 0.0;
            for (int t = 0; t < steps - offset; ++t) acc += x[t] * r[t];
            return acc;
          };
          if (want_w) {
            double acc = (1.0 - f) * offset_dot(scratch.delta.data(), q);
            if (f != 0.0 && q + 1 < steps) {
              acc += f * offset_dot(scratch.delta.data(), q + 1);
            }
            gw_col[static_cast<std::size_t>(j)] += dt * acc;
          }
          if (delay_grads) {
            double w = w_col[static_cast<std::size_t>(j)];
            if (w != 0.0) {
              double acc = (1.0 - f) * offset_dot(scratch.delta_dt_adjoint.data(), q);
              if (f != 0.0 && q + 1 < steps) {
                acc += f * offset_dot(scratch.delta_dt_adjoint.data(), q + 1);
              }
              gd_col[static_cast<std::size_t>(j)] += -dt * w * acc;
            }
          }
        }
      }
    }

    if (l > 0) {
      std::size_t pre_sz = static_cast<std::size_t>(lt.pre) * steps;
      err_prev.resize(pre_sz);
      scratch.corr.resize(post_sz);
      detail::layer_backprop_error(lp.weights, lp.delays, eps, scratch.delta,
                                   steps, err_prev, scratch.corr,
                                   trace.delay_mode);
      std::swap(err, err_prev);
    }
  }
}

GradientSet backward(const ForwardTrace& trace, std::span<const LayerParams> params,
                     const KernelTable& kernels, const SrmConfig& srm,
                     const SurrogateConfig& surrogate,
                     std::span<const Signal> output_error,
                     DerivativeStencil stencil) {
  int steps = trace.grid.steps;
  require(static_cast<int>(output_error.size()) == trace.layers.back().post,
          ErrorKind::contract, "backward: one error signal per output neuron");
  std::vector<double> err_flat(output_error.size() * static_cast<std::size_t>(steps));
  for (std::size_t j = 0; j < output_error.size(); ++j) {
    require(output_error[j].grid == trace.grid, ErrorKind::contract,
            "backward: error grid mismatch");
    std::copy(output_error[j].values.begin(), output_error[j].values.end(),
              err_flat.begin() + static_cast<std::ptrdiff_t>(j * static_cast<std::size_t>(steps)));
  }
  GradientSet grads;
  grads.init_like(params);
  grads.zero();
  BackwardScratch scratch;
  backward_accumulate(trace, params, kernels, srm, surrogate, err_flat, grads,
                      scratch, true, stencil);
  return grads;
}

namespace detail {

void layer_backprop_error(const Matrix& weights, const DelayMatrix& delays,
                          std::span<const double> eps,
                          std::span<const double> delta, int steps,
                          std::span<double> e_prev,
                          std::span<double> corr_scratch, DelayForward mode) {
  int pre = weights.pre();
  int post = weights.post();
  bool fractional = mode == DelayForward::fractional;

  // corr_j(t) = sum_tau eps(tau) delta_j(t + tau): the correlation adjoint
  // of the causal eps convolution.
  for (int j = 0; j < post; ++j) {
    const double* dj = delta.data() + static_cast<std::size_t>(j) * steps;
    double* cj = corr_scratch.data() + static_cast<std::size_t>(j) * steps;
    for (int t = 0; t < steps; ++t) {
      double acc = 0.0;
      for (int tau = 0; tau + t < steps; ++tau) {
        acc += eps[static_cast<std::size_t>(tau)] * dj[t + tau];
      }
      cj[t] = acc;
    }
  }

  std::fill(e_prev.begin(), e_prev.end(), 0.0);
  for (int i = 0; i < pre; ++i) {
    auto w_col = weights.column(i);
    auto q_col = delays.quantized_column(i);
    auto f_col = delays.fraction_column(i);
    double* ei = e_prev.data() + static_cast<std::size_t>(i) * steps;
    for (int j = 0; j < post; ++j) {
      double w = w_col[static_cast<std::size_t>(j)];
      if (w == 0.0) continue;
      int q = q_col[static_cast<std::size_t>(j)];
      if (q >= steps) continue;
      const double* cj = corr_scratch.data() + static_cast<std::size_t>(j) * steps;
      if (fractional) {
        double f = f_col[static_cast<std::size_t>(j)];
        double w_lo = w * (1.0 - f);
        for (int m = 0; m < steps - q; ++m) {
          ei[m] += w_lo * cj[m + q];
        }
        double w_hi = w * f;
        if (w_hi != 0.0 && q + 1 < steps) {
          for (int m = 0; m < steps - q - 1; ++m) {
            ei[m] += w_hi * cj[m + q + 1];
          }
        }
      } else {
        for (int m = 0; m < steps - q; ++m) {
          ei[m] += w * cj[m + q];
        }
      }
    }
  }
}

}  // namespace detail

}  // namespace delaynet
