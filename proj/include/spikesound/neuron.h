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

// Current-based leaky integrate-and-fire neuron with a double-exponential
// post-synaptic kernel and soft (subtractive, decaying) reset:
//
//   V(t) = sum_i w_i sum_{t_i^j < t} K(t - t_i^j)
//          - threshold * sum_{t_s^j < t} exp(-(t - t_s^j) / tau_m)
//   K(d) = V0 * (exp(-d / tau_m) - exp(-d / tau_s)),  max_d K(d) = 1.
//
// Time constants are in milliseconds; spike times crossing the public API are
// in seconds, matching SpikePattern.

#ifndef SPIKESOUND_NEURON_H_
#define SPIKESOUND_NEURON_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spikesound/spike_pattern.h"

namespace spikesound {

struct NeuronParams {
  double tau_m = 20.0;  // ms
  double tau_s = 5.0;   // ms
  double threshold = 1.0;
  double v0 = 1.0;  // peak normalizer, derived from tau_m and tau_s

  // Validates tau_m > tau_s > 0 and threshold > 0, and derives v0.
  static NeuronParams Make(double tau_m, double tau_s, double threshold);

  // Time of the kernel maximum in ms.
  double PeakTime() const;

  NeuronParams WithThreshold(double theta) const {
    NeuronParams p = *this;
    p.threshold = theta;
    return p;
  }
};

// K(dt) for dt in ms; zero for dt <= 0.
double PspKernel(double dt_ms, const NeuronParams& params);

// Input spikes merged across afferents: one entry per distinct time, weight
// summed. Built once and reused when only the threshold changes.
struct InputEvents {
  std::vector<double> time_ms;
  std::vector<double> weight;
  double duration_ms = 0.0;
};

InputEvents BuildEvents(const SpikePattern& pattern, const Eigen::VectorXd& w);

struct SimOptions {
  bool record_trace = false;
  double trace_step_ms = 0.1;
  // Records sub-threshold local maxima and the slope at each output spike.
  bool record_peaks = false;
  // Stop after this many output spikes (0 = unlimited).
  int max_spikes = 0;
};

struct LocalPeak {
  double time = 0.0;  // s
  double value = 0.0;
  bool at_input = false;  // maximum sits on a kink created by an input spike
};

struct SimResult {
  std::vector<double> output_spikes;  // s
  double v_max = 0.0;
  double t_max = 0.0;  // s
  int n_out = 0;
  bool truncated = false;  // max_spikes reached

  std::vector<double> trace;  // V sampled every trace_step from t = 0
  double trace_step = 0.0;    // s

  std::vector<LocalPeak> peaks;
  std::vector<double> spike_slopes;  // dV/dt (per ms) just before each spike
};

// Event-driven exact simulation. Threshold crossings are located to 1e-9 ms
// inside each inter-event interval; the potential is followed until it has
// decayed after the last input. A threshold of +infinity yields the reset-free
// potential and its maximum.
SimResult Simulate(const SpikePattern& pattern, const Eigen::VectorXd& w,
                   const NeuronParams& params, const SimOptions& options = {});
SimResult Simulate(const InputEvents& events, const NeuronParams& params,
                   const SimOptions& options = {});

// Output spike count only; stops once `cap` spikes are reached (0 = no cap).
int CountSpikes(const InputEvents& events, const NeuronParams& params,
                int cap = 0);

// Writes `time_s,voltage` rows.
void WriteTraceCsv(const std::string& path, const SimResult& result);

}  // namespace spikesound

#endif  // SPIKESOUND_NEURON_H_
