// Copyright 2026 The Spikesound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test-only reference implementations. None of these share code paths with
// the library routines they check.

#ifndef SPIKESOUND_TESTS_ORACLES_H_
#define SPIKESOUND_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spikesound/spike_pattern.h"

namespace spikesound::oracle {

// Fixed-step simulation of the soft-reset LIF neuron on a dt_ms grid.
// Crossing times are linearly interpolated between grid points. Returns
// output spike times in ms.
inline std::vector<double> DenseGridSpikes(const SpikePattern& pattern,
                                           const Eigen::VectorXd& w,
                                           double tau_m, double tau_s,
                                           double theta, double dt_ms,
                                           double tail_ms) {
  const double tp = tau_m * tau_s / (tau_m - tau_s) * std::log(tau_m / tau_s);
  const double v0 = 1.0 / (std::exp(-tp / tau_m) - std::exp(-tp / tau_s));
  std::vector<std::pair<double, double>> inputs;
  for (int i = 0; i < pattern.n_afferents; ++i)
    for (double t : pattern.spikes[i]) inputs.emplace_back(t * 1e3, w[i]);
  std::sort(inputs.begin(), inputs.end());
  std::vector<double> out;
  if (inputs.empty()) return out;
  const double t_end = inputs.back().first + tail_ms;
  const double dm = std::exp(-dt_ms / tau_m), ds = std::exp(-dt_ms / tau_s);
  double syn_m = 0.0, syn_s = 0.0, reset = 0.0;
  size_t next = 0;
  double v_prev = 0.0, t_prev = 0.0;
  const long steps = static_cast<long>(std::ceil(t_end / dt_ms));
  for (long n = 0; n <= steps; ++n) {
    const double t = n * dt_ms;
    if (n > 0) {
      syn_m *= dm;
      syn_s *= ds;
      reset *= dm;
    }
    while (next < inputs.size() && inputs[next].first <= t) {
      const double d = t - inputs[next].first;
      syn_m += v0 * inputs[next].second * std::exp(-d / tau_m);
      syn_s += v0 * inputs[next].second * std::exp(-d / tau_s);
      ++next;
    }
    const double v = syn_m - syn_s - reset;
    if (v >= theta && n > 0) {
      const double frac = (theta - v_prev) / (v - v_prev);
      const double ts = t_prev + frac * dt_ms;
      out.push_back(ts);
      reset += theta * std::exp(-(t - ts) / tau_m);
      v_prev = v - theta * std::exp(-(t - ts) / tau_m);
    } else {
      v_prev = v;
    }
    t_prev = t;
  }
  return out;
}

// Direct evaluation of the reset-free potential at t_ms.
inline double DirectPotential(const SpikePattern& pattern,
                              const Eigen::VectorXd& w, double tau_m,
                              double tau_s, double t_ms) {
  const double tp = tau_m * tau_s / (tau_m - tau_s) * std::log(tau_m / tau_s);
  const double v0 = 1.0 / (std::exp(-tp / tau_m) - std::exp(-tp / tau_s));
  double v = 0.0;
  for (int i = 0; i < pattern.n_afferents; ++i)
    for (double s : pattern.spikes[i]) {
      const double d = t_ms - s * 1e3;
      if (d > 0) v += w[i] * v0 * (std::exp(-d / tau_m) - std::exp(-d / tau_s));
    }
  return v;
}

// Power spectrum of one Hamming-windowed frame by the O(n^2) DFT definition.
inline std::vector<double> DirectPowerSpectrum(const std::vector<double>& frame) {
  const size_t n = frame.size();
  std::vector<double> out(n / 2 + 1);
  for (size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const double win = 0.54 - 0.46 * std::cos(2.0 * M_PI * j / (n - 1));
      acc += frame[j] * win * std::polar(1.0, -2.0 * M_PI * k * j / n);
    }
    out[k] = std::norm(acc);
  }
  return out;
}

}  // namespace spikesound::oracle

#endif  // SPIKESOUND_TESTS_ORACLES_H_
