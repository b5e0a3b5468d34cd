#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "delaynet/signal.hpp"

namespace delaynet {

struct SrmConfig {
  double threshold_mv = 10.0;
  double tau_s_ms = 1.0;  // spike-response time constant
  double tau_r_ms = 1.0;  // refractory time constant

  void validate() const {
    require(threshold_mv > 0.0, ErrorKind::config, "SrmConfig: threshold must be > 0");
    require(tau_s_ms > 0.0, ErrorKind::config, "SrmConfig: tau_s must be > 0");
    require(tau_r_ms > 0.0, ErrorKind::config, "SrmConfig: tau_r must be > 0");
  }
};

// Spike response kernel eps(t) = (t/tau_s) exp(1 - t/tau_s) for t >= 0.
// Peaks at t = tau_s with value 1; eps(0) = 0.
double eps_kernel_at(double t_ms, double tau_s_ms);

// Refractory kernel nu(t) = -2 theta exp(1 - t/tau_r) for t >= 0. Always <= 0.
double nu_kernel_at(double t_ms, double tau_r_ms, double threshold_mv);

// Analytic time derivative of eps, used as a test oracle for the
// finite-difference PSP derivative.
double eps_kernel_derivative_at(double t_ms, double tau_s_ms);

// eps and nu sampled on the simulation grid.
struct KernelTable {
  Signal eps;
  Signal nu;
};

KernelTable eval_kernels(const SrmConfig& cfg, const TimeGrid& grid);

// Causal threshold dynamics: u[k] = drive[k] + sum over earlier output
// spikes m < k of nu[k - m]; a spike is emitted whenever u[k] >= threshold.
// A spike's own refractory contribution starts strictly after its
// emission step, so the committed u[k] is never revised. At most one
// spike per step.
std::pair<SpikeTrain, Signal> simulate_neuron(const Signal& drive,
                                              const KernelTable& kernels,
                                              const SrmConfig& cfg);

namespace detail {

// Span core shared by simulate_neuron and the network forward pass.
// `spikes` and `u` must each hold `steps` elements.
void simulate_neuron_span(std::span<const double> drive,
                          std::span<const double> nu, double threshold,
                          std::span<std::uint8_t> spikes, std::span<double> u);

}  // namespace detail

}  // namespace delaynet
