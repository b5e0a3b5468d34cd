#include "delaynet/srm.hpp"

#include <cmath>

namespace delaynet {

double eps_kernel_at(double t_ms, double tau_s_ms) {
  if (t_ms < 0.0) return 0.0;
  double r = t_ms / tau_s_ms;
  return r * std::exp(1.0 - r);
}

double nu_kernel_at(double t_ms, double tau_r_ms, double threshold_mv) {
  if (t_ms < 0.0) return 0.0;
  return -2.0 * threshold_mv * std::exp(1.0 - t_ms / tau_r_ms);
}

double eps_kernel_derivative_at(double t_ms, double tau_s_ms) {
  if (t_ms < 0.0) return 0.0;
  double r = t_ms / tau_s_ms;
  return (1.0 - r) / tau_s_ms * std::exp(1.0 - r);
}

KernelTable eval_kernels(const SrmConfig& cfg, const TimeGrid& grid) {
  cfg.validate();
  grid.validate();
  KernelTable table{Signal::zeros(grid), Signal::zeros(grid)};
  for (int k = 0; k < grid.steps; ++k) {
    double t = grid.time_at(k);
    table.eps[k] = eps_kernel_at(t, cfg.tau_s_ms);
    table.nu[k] = nu_kernel_at(t, cfg.tau_r_ms, cfg.threshold_mv);
  }
  return table;
}

std::pair<SpikeTrain, Signal> simulate_neuron(const Signal& drive,
                                              const KernelTable& kernels,
                                              const SrmConfig& cfg) {
  require(drive.grid == kernels.eps.grid, ErrorKind::config,
          "simulate_neuron: drive and kernels must share a grid");
  for (double v : drive.values) {
    require(std::isfinite(v), ErrorKind::numeric,
            "simulate_neuron: drive contains non-finite values");
  }
  SpikeTrain spikes = SpikeTrain::empty(drive.grid);
  Signal u = Signal::zeros(drive.grid);
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(drive.grid.steps), 0);
  detail::simulate_neuron_span(drive.values, kernels.nu.values,
                               cfg.threshold_mv, raw, u.values);
  for (int k = 0; k < drive.grid.steps; ++k) {
    spikes.counts[static_cast<std::size_t>(k)] = raw[static_cast<std::size_t>(k)];
  }
  return {std::move(spikes), std::move(u)};
}

namespace detail {

void simulate_neuron_span(std::span<const double> drive,
                          std::span<const double> nu, double threshold,
                          std::span<std::uint8_t> spikes, std::span<double> u) {
  std::size_t steps = drive.size();
  for (std::size_t k = 0; k < steps; ++k) u[k] = drive[k];
  for (std::size_t k = 0; k < steps; ++k) {
    if (u[k] >= threshold) {
      spikes[k] = 1;
      for (std::size_t m = k + 1; m < steps; ++m) {
        u[m] += nu[m - k];
      }
    } else {
      spikes[k] = 0;
    }
  }
}

}  // namespace detail

}  // namespace delaynet
