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

// Generators for synthetic spike-pattern tasks.

#ifndef SPIKESOUND_SYNTHETIC_H_
#define SPIKESOUND_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "spikesound/spike_pattern.h"

namespace spikesound {

// r(t) = baseline + sum_p height_p * exp(-((t - c_p) / b_p)^2), t in [0, T].
struct RateProfile {
  struct Peak {
    double center_ms = 0.0;
    double width_ms = 1.0;
    double height = 0.0;  // Hz
  };
  double baseline = 0.0;  // Hz
  std::vector<Peak> peaks;
  double duration = 0.5;  // s

  double Rate(double t_s) const;
  // Upper bound of r(t) used as the thinning envelope.
  double Envelope() const;
  void Validate() const;

  // 1 Hz baseline with 4 Hz bumps at 150 and 350 ms, width 20 ms, T = 0.5 s.
  static RateProfile TwoPeak();
};

struct NoiseSpec {
  double sigma_jit_ms = 0.0;
  double p_del = 0.0;
};

// Homogeneous Poisson trains on [0, T] for each afferent.
SpikePattern PoissonPattern(int n_afferents, double rate_hz, double duration_s,
                            uint64_t seed);

// Deletes each spike with p_del, then jitters survivors by N(0, sigma^2),
// clipping to [0, T].
SpikePattern Perturb(const SpikePattern& tmpl, const NoiseSpec& noise,
                     uint64_t seed);

// Inhomogeneous Poisson trains via thinning against Envelope().
SpikePattern InhomogeneousPattern(const RateProfile& profile, int n_afferents,
                                  uint64_t seed);

// (1/T) * integral_0^T r(t) dt by adaptive Simpson quadrature.
double MatchedHomogeneousRate(const RateProfile& profile);

}  // namespace spikesound

#endif  // SPIKESOUND_SYNTHETIC_H_
