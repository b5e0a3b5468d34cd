// Independent reference implementations used as test oracles. These are
// deliberately naive (double loops, scalar state) and must stay decoupled
// from the library's computation paths.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

// Direct double-loop causal convolution.
inline std::vector<double> convolve_naive(const std::vector<double>& kernel,
                                          const std::vector<double>& in) {
  std::size_t n = in.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t m = 0; m <= k; ++m) {
      out[k] += kernel[k - m] * in[m];
    }
  }
  return out;
}

inline double inner_product_naive(const std::vector<double>& x,
                                  const std::vector<double>& y, double dt) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * y[k];
  return acc * dt;
}

// Scalar step-by-step SRM neuron: membrane = drive + refractory sum over
// past spikes, spike when membrane >= threshold.
struct ScalarSrmResult {
  std::vector<int> spikes;
  std::vector<double> u;
};

inline ScalarSrmResult simulate_scalar_srm(const std::vector<double>& drive,
                                           const std::vector<double>& nu,
                                           double threshold) {
  std::size_t n = drive.size();
  ScalarSrmResult r{std::vector<int>(n, 0), std::vector<double>(n, 0.0)};
  std::vector<std::size_t> spike_steps;
  for (std::size_t k = 0; k < n; ++k) {
    double u = drive[k];
    for (std::size_t s : spike_steps) {
      u += nu[k - s];
    }
    r.u[k] = u;
    if (u >= threshold) {
      r.spikes[k] = 1;
      spike_steps.push_back(k);
    }
  }
  return r;
}

// Reference Adam on one scalar parameter.
struct ScalarAdam {
  double lr = 0.01, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double m = 0.0, v = 0.0;
  std::uint64_t t = 0;

  double step(double p, double g) {
    t += 1;
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g * g;
    double mhat = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
    double vhat = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
    return p - lr * mhat / (std::sqrt(vhat) + eps);
  }
};

}  // namespace oracles
