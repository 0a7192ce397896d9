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

#include "spikesound/sts.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spikesound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ResetFreeMax(const InputEvents& events, const NeuronParams& params) {
  return Simulate(events, params.WithThreshold(kInf)).v_max;
}

bool Reaches(const InputEvents& events, const NeuronParams& params,
             double theta, int k) {
  return CountSpikes(events, params.WithThreshold(theta), k) >= k;
}

}  // namespace

std::optional<CriticalPoint> FindCriticalThreshold(
    const InputEvents& events, const NeuronParams& params, int k,
    double rel_tol, std::optional<double> lo_hint,
    std::optional<double> hi_hint) {
  if (k < 1) throw std::invalid_argument("critical threshold: k must be >= 1");
  const double theta1 = ResetFreeMax(events, params);
  if (!(theta1 > 0.0)) return std::nullopt;
  if (k == 1) {
    return CriticalPoint{theta1, theta1 * (1.0 - 1e-15), theta1 * (1.0 + 1e-12)};
  }

  double hi = theta1 * (1.0 + 1e-12);
  if (hi_hint && *hi_hint > 0.0 && *hi_hint < hi &&
      !Reaches(events, params, *hi_hint, k)) {
    hi = *hi_hint;
  }
  double lo;
  if (lo_hint && *lo_hint > 0.0 && *lo_hint < hi &&
      Reaches(events, params, *lo_hint, k)) {
    lo = *lo_hint;
  } else {
    const double floor = theta1 * kCriticalFloorRatio;
    lo = 0.5 * hi;
    while (!Reaches(events, params, lo, k)) {
      hi = lo;
      lo *= 0.5;
      if (lo < floor) return std::nullopt;
    }
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (Reaches(events, params, mid, k)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return CriticalPoint{0.5 * (lo + hi), lo, hi};
}

std::optional<double> CriticalThreshold(const SpikePattern& pattern,
                                        const Eigen::VectorXd& w, int k,
                                        const NeuronParams& params,
                                        double rel_tol) {
  auto cp = FindCriticalThreshold(BuildEvents(pattern, w), params, k, rel_tol);
  if (!cp) return std::nullopt;
  return cp->value;
}

int StsProfile::CountAt(double theta) const {
  int count = 0;
  for (int k = 0; k < static_cast<int>(critical.size()); ++k) {
    if (critical[k] && *critical[k] > theta) count = k + 1;
  }
  return count;
}

StsProfile ComputeStsProfile(const SpikePattern& pattern,
                             const Eigen::VectorXd& w, int K,
                             const NeuronParams& params, double rel_tol) {
  if (K < 1) throw std::invalid_argument("sts profile: K must be >= 1");
  const InputEvents events = BuildEvents(pattern, w);
  StsProfile profile;
  profile.K = K;
  profile.critical.assign(K, std::nullopt);
  std::optional<double> hi_hint;
  for (int k = 1; k <= K; ++k) {
    auto cp = FindCriticalThreshold(events, params, k, rel_tol, std::nullopt,
                                    hi_hint);
    if (!cp) break;  // deeper k need even smaller thresholds
    profile.critical[k - 1] = cp->value;
    hi_hint = cp->hi;
  }
  return profile;
}

namespace {

// sum_f K(t - t_i^f) for every afferent i; t in ms.
Eigen::VectorXd KernelSums(const SpikePattern& pattern, double t_ms,
                           const NeuronParams& params) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(pattern.n_afferents);
  for (int i = 0; i < pattern.n_afferents; ++i) {
    double acc = 0.0;
    for (double s : pattern.spikes[i]) {
      const double d = t_ms - s * 1e3;
      if (d <= 0.0) break;
      acc += PspKernel(d, params);
    }
    out[i] = acc;
  }
  return out;
}

CriticalGradient NonDifferentiable(CriticalGradient g, std::string why) {
  g.differentiable = false;
  g.reason = "non-differentiable point: " + std::move(why);
  return g;
}

}  // namespace

CriticalGradient CriticalThresholdGrad(const SpikePattern& pattern,
                                       const Eigen::VectorXd& w, int k,
                                       const NeuronParams& params,
                                       std::optional<double> lo_hint,
                                       std::optional<double> hi_hint) {
  if (k < 1) throw std::invalid_argument("critical gradient: k must be >= 1");
  const InputEvents events = BuildEvents(pattern, w);
  auto cp = FindCriticalThreshold(events, params, k, 1e-13, lo_hint, hi_hint);
  if (!cp) {
    throw std::invalid_argument("critical gradient: theta*_" +
                                std::to_string(k) + " undefined");
  }
  CriticalGradient g;
  g.k = k;
  g.theta_star = cp->value;
  g.dtheta_dw = Eigen::VectorXd::Zero(pattern.n_afferents);

  // Just above theta*_k the critical peak stays (barely) sub-threshold.
  const double theta = cp->hi;
  SimOptions options;
  options.record_peaks = true;
  const SimResult sim = Simulate(events, params.WithThreshold(theta), options);

  const LocalPeak* best = nullptr;
  for (const auto& p : sim.peaks) {
    if (p.value <= theta && (!best || p.value > best->value)) best = &p;
  }
  if (!best || theta - best->value > 1e-8 * theta) {
    return NonDifferentiable(g, "no tangent peak");
  }
  bool competing = false;
  for (const auto& p : sim.peaks) {
    if (&p != best && std::abs(p.time - best->time) > 1e-9 &&
        theta - p.value < 1e-6 * theta) {
      competing = true;
    }
  }
  const double t_star = best->time * 1e3;

  // Output spikes before the critical peak, t_j = a_j + b_j * dtheta.
  std::vector<double> spikes;
  std::vector<double> slopes;
  for (size_t j = 0; j < sim.output_spikes.size(); ++j) {
    if (sim.output_spikes[j] * 1e3 < t_star) {
      spikes.push_back(sim.output_spikes[j] * 1e3);
      slopes.push_back(sim.spike_slopes[j]);
    }
  }
  const double tm = params.tau_m;
  const double slope_floor = 1e-9 * theta / tm;
  for (size_t j = 0; j < spikes.size(); ++j) {
    if (!(slopes[j] > slope_floor)) {
      return NonDifferentiable(g, "tangential output spike");
    }
    for (double t_in : events.time_ms) {
      if (std::abs(t_in - spikes[j]) < 1e-9) {
        return NonDifferentiable(g, "input coincides with output spike");
      }
    }
  }

  const int n = pattern.n_afferents;
  std::vector<Eigen::VectorXd> a(spikes.size());
  std::vector<double> b(spikes.size());
  for (size_t j = 0; j < spikes.size(); ++j) {
    Eigen::VectorXd aj = -KernelSums(pattern, spikes[j], params);
    double bj = 1.0;
    for (size_t l = 0; l < j; ++l) {
      const double e = std::exp(-(spikes[j] - spikes[l]) / tm);
      bj += e;
      aj += (theta / tm) * e * a[l];
      bj += (theta / tm) * e * b[l];
    }
    a[j] = aj / slopes[j];
    b[j] = bj / slopes[j];
  }
  Eigen::VectorXd numer = KernelSums(pattern, t_star, params);
  double denom = 1.0;
  for (size_t j = 0; j < spikes.size(); ++j) {
    const double e = std::exp(-(t_star - spikes[j]) / tm);
    denom += e + (theta / tm) * e * b[j];
    numer -= (theta / tm) * e * a[j];
  }
  if (!(std::abs(denom) > 1e-12)) return NonDifferentiable(g, "singular system");
  g.dtheta_dw = numer / denom;
  if (!g.dtheta_dw.allFinite() || g.dtheta_dw.size() != n) {
    g.dtheta_dw.setZero();
    return NonDifferentiable(g, "non-finite gradient");
  }
  if (competing) {
    g.one_sided = true;
    return NonDifferentiable(g, "competing critical peaks");
  }
  return g;
}

FdGradient FdGradientOracle(const SpikePattern& pattern,
                            const Eigen::VectorXd& w, int k,
                            const NeuronParams& params, double h,
                            double rel_tol) {
  if (!(h > 0.0)) h = 1e-6;
  const int n = pattern.n_afferents;
  FdGradient out;
  out.value = Eigen::VectorXd::Zero(n);
  out.available.assign(n, false);
  auto base = FindCriticalThreshold(BuildEvents(pattern, w), params, k, 1e-10);
  if (!base) return out;
  const double lo_hint = base->value * (1.0 - 1e-4);
  const double hi_hint = base->value * (1.0 + 1e-4);
  for (int i = 0; i < n; ++i) {
    const double hi_step = h * std::max(1.0, std::abs(w[i]));
    Eigen::VectorXd wp = w, wm = w;
    wp[i] += hi_step;
    wm[i] -= hi_step;
    auto plus = FindCriticalThreshold(BuildEvents(pattern, wp), params, k,
                                      rel_tol, lo_hint, hi_hint);
    auto minus = FindCriticalThreshold(BuildEvents(pattern, wm), params, k,
                                       rel_tol, lo_hint, hi_hint);
    if (!plus || !minus) continue;
    out.value[i] = (plus->value - minus->value) / (2.0 * hi_step);
    out.available[i] = true;
  }
  return out;
}

Eigen::VectorXd CriticalGradientOrFallback(const SpikePattern& pattern,
                                           const Eigen::VectorXd& w, int k,
                                           const NeuronParams& params,
                                           bool* used_fallback,
                                           std::optional<double> lo_hint,
                                           std::optional<double> hi_hint) {
  CriticalGradient g =
      CriticalThresholdGrad(pattern, w, k, params, lo_hint, hi_hint);
  if (used_fallback) *used_fallback = !g.differentiable;
  if (g.differentiable || g.one_sided) return g.dtheta_dw;
  return FdGradientOracle(pattern, w, k, params, 0.0, 1e-12).value;
}

}  // namespace spikesound
