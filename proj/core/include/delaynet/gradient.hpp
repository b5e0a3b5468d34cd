#pragma once

#include <span>
#include <vector>

#include "delaynet/loss.hpp"
#include "delaynet/network.hpp"

namespace delaynet {

// Surrogate for the spike threshold's derivative:
// rho(u) = alpha * beta * exp(-beta * |u - theta|).
struct SurrogateConfig {
  double alpha = 1.0;
  double beta = 1.0;  // 1/mV

  void validate() const {
    require(alpha > 0.0 && beta > 0.0, ErrorKind::config,
            "SurrogateConfig: alpha and beta must be positive");
  }
};

Signal spike_derivative(const Signal& u, const SurrogateConfig& cfg,
                        double threshold_mv);

// Per-layer weight and delay gradients, shaped like LayerParams.
struct GradientSet {
  std::vector<Matrix> weight_grad;
  std::vector<Matrix> delay_grad;

  void init_like(std::span<const LayerParams> params);
  void zero();
  void scale(double factor);
};

// Reusable buffers for backward_accumulate.
struct BackwardScratch {
  std::vector<double> delta;
  std::vector<double> delta_dt_adjoint;
  std::vector<double> corr;
  std::vector<double> err_a;
  std::vector<double> err_b;
  std::vector<double> delta_table;      // common-PSP path: post x (steps + 2)
  std::vector<double> delta_dt_table;
};

// Surrogate backward pass over a cached forward trace.
//
// Per layer, from the output inward:
//   delta_j(t)     = e_j(t) * rho(u_j(t))
//   dE/dw_ij       = dt * sum_t a_ij(t) delta_j(t)
//   dE/dd_ij       = -dt * w_ij * sum_t adot_ij(t) delta_j(t)
//   e_i(t)         = sum_j w_ij * (eps-correlation of delta_j, advanced by q_ij)
// where a_ij is the delayed presynaptic PSP from the trace and adot its
// finite-difference time derivative. The refractory feedback path is
// excluded from the graph, and frozen layers get zero weight gradients
// but still propagate error. Gradients are ADDED into `grads` (callers
// zero it per batch and average afterwards).
void backward_accumulate(const ForwardTrace& trace,
                         std::span<const LayerParams> params,
                         const KernelTable& kernels, const SrmConfig& srm,
                         const SurrogateConfig& surrogate,
                         std::span<const double> output_error,  // post x steps
                         GradientSet& grads, BackwardScratch& scratch,
                         bool delay_grads = true,
                         DerivativeStencil stencil = DerivativeStencil::central);

// Convenience wrapper over a per-neuron error signal vector.
GradientSet backward(const ForwardTrace& trace, std::span<const LayerParams> params,
                     const KernelTable& kernels, const SrmConfig& srm,
                     const SurrogateConfig& surrogate,
                     std::span<const Signal> output_error,
                     DerivativeStencil stencil = DerivativeStencil::central);

namespace detail {

// Adjoint of the linear forward chain in layer_drive (delay shift, then
// eps convolution, then weight sum), acting on delta (post x steps) to
// produce the previous layer's error (pre x steps). corr_scratch must
// hold post x steps values.
void layer_backprop_error(const Matrix& weights, const DelayMatrix& delays,
                          std::span<const double> eps,
                          std::span<const double> delta, int steps,
                          std::span<double> e_prev,
                          std::span<double> corr_scratch,
                          DelayForward mode = DelayForward::quantized);

}  // namespace detail

}  // namespace delaynet
