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

// Spike-threshold surface: the critical thresholds theta*_k at which the
// output spike count of a neuron drops below k, and their weight gradients.

#ifndef SPIKESOUND_STS_H_
#define SPIKESOUND_STS_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spikesound/neuron.h"
#include "spikesound/spike_pattern.h"

namespace spikesound {

// theta*_k with the final bisection bracket: count(lo) >= k > count(hi).
struct CriticalPoint {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Thresholds below kFloorRatio * theta*_1 are not searched; a k that needs a
// smaller threshold is reported undefined.
inline constexpr double kCriticalFloorRatio = 1e-6;

// Bisection on the output spike count. Optional brackets are verified before
// use and ignored if they do not bracket the transition. Returns nullopt when
// no positive threshold yields k spikes.
std::optional<CriticalPoint> FindCriticalThreshold(
    const InputEvents& events, const NeuronParams& params, int k,
    double rel_tol = 1e-8, std::optional<double> lo_hint = std::nullopt,
    std::optional<double> hi_hint = std::nullopt);

std::optional<double> CriticalThreshold(const SpikePattern& pattern,
                                        const Eigen::VectorXd& w, int k,
                                        const NeuronParams& params,
                                        double rel_tol = 1e-8);

struct StsProfile {
  int K = 0;
  std::vector<std::optional<double>> critical;  // index k-1 holds theta*_k

  // Output count predicted for threshold theta: max{k : theta*_k > theta}.
  int CountAt(double theta) const;
};

inline constexpr int kDefaultStsDepth = 64;

StsProfile ComputeStsProfile(const SpikePattern& pattern,
                             const Eigen::VectorXd& w, int K,
                             const NeuronParams& params,
                             double rel_tol = 1e-8);

struct CriticalGradient {
  int k = 0;
  double theta_star = 0.0;
  Eigen::VectorXd dtheta_dw;
  bool differentiable = true;
  // Several peaks touch theta*_k; dtheta_dw is the gradient of the highest.
  bool one_sided = false;
  std::string reason;  // set when !differentiable
};

// d theta*_k / dw by implicit differentiation through the output spikes that
// precede the tangent (critical) peak. Throws std::invalid_argument when
// theta*_k is undefined or k < 1; returns differentiable = false at
// non-differentiable points. Hints seed the bisection as in
// FindCriticalThreshold.
CriticalGradient CriticalThresholdGrad(
    const SpikePattern& pattern, const Eigen::VectorXd& w, int k,
    const NeuronParams& params, std::optional<double> lo_hint = std::nullopt,
    std::optional<double> hi_hint = std::nullopt);

struct FdGradient {
  Eigen::VectorXd value;
  std::vector<bool> available;
};

// Central differences of theta*_k, h_i = h * max(1, |w_i|). h <= 0 selects
// the default 1e-6.
FdGradient FdGradientOracle(const SpikePattern& pattern,
                            const Eigen::VectorXd& w, int k,
                            const NeuronParams& params, double h = 0.0,
                            double rel_tol = 1e-14);

// Analytic gradient (one-sided where critical peaks compete), or the
// finite-difference value at other non-differentiable points (unavailable
// coordinates are zero).
Eigen::VectorXd CriticalGradientOrFallback(
    const SpikePattern& pattern, const Eigen::VectorXd& w, int k,
    const NeuronParams& params, bool* used_fallback = nullptr,
    std::optional<double> lo_hint = std::nullopt,
    std::optional<double> hi_hint = std::nullopt);

}  // namespace spikesound

#endif  // SPIKESOUND_STS_H_
