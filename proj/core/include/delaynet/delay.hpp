#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "delaynet/signal.hpp"

namespace delaynet {

// floor(d / dt): round a real delay down to whole grid steps.
int quantize_delay(double delay_ms, const TimeGrid& grid);

// Finite-difference stencil used for PSP time derivatives in the delay
// gradient. `central` is second-order on smooth signals; `upwind` is the
// derivative of the causal zero-padded signal and stays exactly zero over
// a delayed PSP's silent onset (see time_derivative_upwind_span).
enum class DerivativeStencil { central, upwind };

// Per-synapse real-valued delays, post x pre, bounded to [0, d_max].
// Real values are what the optimizer trains; the forward and backward
// passes only ever see the floor-quantized view, which is cached here and
// refreshed whenever the values change.
class DelayMatrix {
 public:
  DelayMatrix() = default;
  DelayMatrix(int post, int pre, double d_max_ms, const TimeGrid& grid);

  int post() const { return post_; }
  int pre() const { return pre_; }
  double d_max_ms() const { return d_max_ms_; }

  double at(int j_post, int i_pre) const {
    return values_[index(j_post, i_pre)];
  }
  int quantized_at(int j_post, int i_pre) const {
    return quantized_[index(j_post, i_pre)];
  }

  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> quantized() const { return quantized_; }
  std::span<const std::uint8_t> quantized_column(int i_pre) const {
    return {quantized_.data() + static_cast<std::size_t>(i_pre) * post_,
            static_cast<std::size_t>(post_)};
  }
  // Sub-step remainder d/dt - floor(d/dt) in [0, 1), cached alongside the
  // quantized view; drives the linear interpolation of the fractional
  // training forward.
  std::span<const float> fraction() const { return fraction_; }
  std::span<const float> fraction_column(int i_pre) const {
    return {fraction_.data() + static_cast<std::size_t>(i_pre) * post_,
            static_cast<std::size_t>(post_)};
  }

  // Mutable access for the optimizer. Callers must clamp_and_requantize()
  // after writing, or the quantized view goes stale.
  std::span<double> mutable_values() { return values_; }

  void set(int j_post, int i_pre, double delay_ms);
  void fill(double delay_ms);

  // Project values back into [0, d_max] and refresh the quantized cache.
  void clamp_and_requantize();

 private:
  std::size_t index(int j_post, int i_pre) const {
    return static_cast<std::size_t>(i_pre) * post_ + static_cast<std::size_t>(j_post);
  }

  int post_ = 0;
  int pre_ = 0;
  double d_max_ms_ = 0.0;
  TimeGrid grid_;
  std::vector<double> values_;
  std::vector<std::uint8_t> quantized_;
  std::vector<float> fraction_;
};

// Per-synapse delayed spike trains: out[j][i] = shift_right(pre[i], q(d_ji)).
// Equivalent to shifting the eps kernel by the same amount before
// convolution (tested). Materializes post x pre trains, so this is for
// small nets and tests; the network forward keeps the factored form.
std::vector<std::vector<SpikeTrain>> apply_delays(
    std::span<const SpikeTrain> pre_trains, const DelayMatrix& delays);

// Central finite difference on the grid, one-sided at the window edges.
// Realizes the time derivative of a delayed PSP trace, which is what the
// delay gradient needs (d/dd eps(t - d) = -(d/dt) eps(t - d)).
Signal psp_time_derivative(const Signal& a);

namespace detail {

void time_derivative_span(std::span<const double> a, double dt_ms,
                          std::span<double> out);

// Exact adjoint of time_derivative_span as a linear operator on the
// window: <D a, y> = <a, D^T y> for all a, y.
void time_derivative_adjoint_span(std::span<const double> y, double dt_ms,
                                  std::span<double> out);

// Upwind variant: out[k] = (a[k] - a[k-1]) / dt with a[-1] = 0, i.e. the
// derivative consistent with causal zero-padding. Unlike the central
// stencil it is exactly zero across a delayed PSP's silent onset, where
// the true time derivative is zero. (The central stencil straddles the
// onset kink and manufactures a spurious derivative there, which is an
// O(1) error, not the O(dt^2) of the smooth case.)
void time_derivative_upwind_span(std::span<const double> a, double dt_ms,
                                 std::span<double> out);
void time_derivative_upwind_adjoint_span(std::span<const double> y, double dt_ms,
                                         std::span<double> out);

}  // namespace detail

}  // namespace delaynet
