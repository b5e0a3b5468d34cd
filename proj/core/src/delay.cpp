#include "delaynet/delay.hpp"

#include <algorithm>
#include <cmath>

namespace delaynet {

int quantize_delay(double delay_ms, const TimeGrid& grid) {
  require(delay_ms >= 0.0, ErrorKind::contract,
          "quantize_delay: delay must be non-negative");
  return static_cast<int>(std::floor(delay_ms / grid.dt_ms));
}

DelayMatrix::DelayMatrix(int post, int pre, double d_max_ms, const TimeGrid& grid)
    : post_(post), pre_(pre), d_max_ms_(d_max_ms), grid_(grid),
      values_(static_cast<std::size_t>(post) * static_cast<std::size_t>(pre), 0.0),
      quantized_(values_.size(), 0), fraction_(values_.size(), 0.0f) {
  require(post >= 1 && pre >= 1, ErrorKind::config, "DelayMatrix: sizes must be positive");
  require(d_max_ms >= 0.0, ErrorKind::config, "DelayMatrix: d_max must be >= 0");
  grid.validate();
}

void DelayMatrix::set(int j_post, int i_pre, double delay_ms) {
  require(delay_ms >= 0.0 && delay_ms <= d_max_ms_, ErrorKind::contract,
          "DelayMatrix::set: delay out of [0, d_max]");
  std::size_t idx = index(j_post, i_pre);
  int q = quantize_delay(delay_ms, grid_);
  values_[idx] = delay_ms;
  quantized_[idx] = static_cast<std::uint8_t>(q);
  fraction_[idx] = static_cast<float>(delay_ms / grid_.dt_ms - q);
}

void DelayMatrix::fill(double delay_ms) {
  require(delay_ms >= 0.0 && delay_ms <= d_max_ms_, ErrorKind::contract,
          "DelayMatrix::fill: delay out of [0, d_max]");
  std::fill(values_.begin(), values_.end(), delay_ms);
  int q = quantize_delay(delay_ms, grid_);
  std::fill(quantized_.begin(), quantized_.end(), static_cast<std::uint8_t>(q));
  std::fill(fraction_.begin(), fraction_.end(),
            static_cast<float>(delay_ms / grid_.dt_ms - q));
}

void DelayMatrix::clamp_and_requantize() {
  double inv_dt = 1.0 / grid_.dt_ms;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double d = values_[i];
    if (d < 0.0) d = 0.0;
    if (d > d_max_ms_) d = d_max_ms_;
    values_[i] = d;
    double q = std::floor(d * inv_dt);
    quantized_[i] = static_cast<std::uint8_t>(q);
    fraction_[i] = static_cast<float>(d * inv_dt - q);
  }
}

std::vector<std::vector<SpikeTrain>> apply_delays(
    std::span<const SpikeTrain> pre_trains, const DelayMatrix& delays) {
  require(static_cast<int>(pre_trains.size()) == delays.pre(), ErrorKind::config,
          "apply_delays: train count must equal presynaptic size");
  std::vector<std::vector<SpikeTrain>> out(static_cast<std::size_t>(delays.post()));
  for (int j = 0; j < delays.post(); ++j) {
    out[static_cast<std::size_t>(j)].reserve(static_cast<std::size_t>(delays.pre()));
    for (int i = 0; i < delays.pre(); ++i) {
      out[static_cast<std::size_t>(j)].push_back(
          shift_right(pre_trains[static_cast<std::size_t>(i)],
                      delays.quantized_at(j, i)));
    }
  }
  return out;
}

Signal psp_time_derivative(const Signal& a) {
  Signal out = Signal::zeros(a.grid);
  detail::time_derivative_span(a.values, a.grid.dt_ms, out.values);
  return out;
}

namespace detail {

void time_derivative_span(std::span<const double> a, double dt_ms,
                          std::span<double> out) {
  std::size_t n = a.size();
  if (n == 1) {
    out[0] = 0.0;
    return;
  }
  out[0] = (a[1] - a[0]) / dt_ms;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    out[k] = (a[k + 1] - a[k - 1]) / (2.0 * dt_ms);
  }
  out[n - 1] = (a[n - 1] - a[n - 2]) / dt_ms;
}

void time_derivative_adjoint_span(std::span<const double> y, double dt_ms,
                                  std::span<double> out) {
  std::size_t n = y.size();
  std::fill(out.begin(), out.end(), 0.0);
  if (n == 1) return;
  // Scatter each row of the derivative stencil into its columns.
  out[0] -= y[0] / dt_ms;
  out[1] += y[0] / dt_ms;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    out[k - 1] -= y[k] / (2.0 * dt_ms);
    out[k + 1] += y[k] / (2.0 * dt_ms);
  }
  out[n - 2] -= y[n - 1] / dt_ms;
  out[n - 1] += y[n - 1] / dt_ms;
}

void time_derivative_upwind_span(std::span<const double> a, double dt_ms,
                                 std::span<double> out) {
  std::size_t n = a.size();
  if (n == 0) return;
  out[0] = a[0] / dt_ms;
  for (std::size_t k = 1; k < n; ++k) {
    out[k] = (a[k] - a[k - 1]) / dt_ms;
  }
}

void time_derivative_upwind_adjoint_span(std::span<const double> y, double dt_ms,
                                         std::span<double> out) {
  std::size_t n = y.size();
  if (n == 0) return;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    out[k] = (y[k] - y[k + 1]) / dt_ms;
  }
  out[n - 1] = y[n - 1] / dt_ms;
}

}  // namespace detail

}  // namespace delaynet
