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

#include "spikesound/synthetic.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "spikesound/random.h"

namespace spikesound {

double RateProfile::Rate(double t_s) const {
  const double t_ms = t_s * 1e3;
  double r = baseline;
  for (const auto& p : peaks) {
    const double z = (t_ms - p.center_ms) / p.width_ms;
    r += p.height * std::exp(-z * z);
  }
  return r;
}

double RateProfile::Envelope() const {
  double r = baseline;
  for (const auto& p : peaks) r += std::max(0.0, p.height);
  return r;
}

void RateProfile::Validate() const {
  if (baseline < 0.0 || !(duration > 0.0)) {
    throw std::invalid_argument("rate profile: need baseline >= 0, duration > 0");
  }
  for (const auto& p : peaks) {
    if (!(p.width_ms > 0.0) || p.height < 0.0) {
      throw std::invalid_argument("rate profile: need width > 0, height >= 0");
    }
  }
}

RateProfile RateProfile::TwoPeak() {
  RateProfile p;
  p.baseline = 1.0;
  p.peaks = {{150.0, 20.0, 4.0}, {350.0, 20.0, 4.0}};
  p.duration = 0.5;
  return p;
}

namespace {

double Exponential(Rng& rng, double rate) {
  return -std::log1p(-Uniform01(rng)) / rate;
}

}  // namespace

SpikePattern PoissonPattern(int n_afferents, double rate_hz, double duration_s,
                            uint64_t seed) {
  if (rate_hz < 0.0) throw std::invalid_argument("poisson: negative rate");
  SpikePattern p(n_afferents, duration_s);
  if (rate_hz == 0.0) return p;
  Rng rng = MakeRng(seed, {0x706f6973});
  for (int i = 0; i < n_afferents; ++i) {
    for (double t = Exponential(rng, rate_hz); t <= duration_s;
         t += Exponential(rng, rate_hz)) {
      p.spikes[i].push_back(t);
    }
  }
  return p;
}

SpikePattern Perturb(const SpikePattern& tmpl, const NoiseSpec& noise,
                     uint64_t seed) {
  if (noise.sigma_jit_ms < 0.0 || noise.p_del < 0.0 || noise.p_del > 1.0) {
    throw std::invalid_argument("perturb: bad noise spec");
  }
  Rng rng = MakeRng(seed, {0x70657274});
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpikePattern out(tmpl.n_afferents, tmpl.duration);
  for (int i = 0; i < tmpl.n_afferents; ++i) {
    for (double t : tmpl.spikes[i]) {
      if (noise.p_del > 0.0 && Uniform01(rng) < noise.p_del) continue;
      double s = t;
      if (noise.sigma_jit_ms > 0.0) s += gauss(rng) * noise.sigma_jit_ms * 1e-3;
      out.spikes[i].push_back(std::clamp(s, 0.0, tmpl.duration));
    }
    std::sort(out.spikes[i].begin(), out.spikes[i].end());
  }
  return out;
}

SpikePattern InhomogeneousPattern(const RateProfile& profile, int n_afferents,
                                  uint64_t seed) {
  profile.Validate();
  SpikePattern p(n_afferents, profile.duration);
  const double envelope = profile.Envelope();
  if (envelope <= 0.0) return p;
  Rng rng = MakeRng(seed, {0x696e686f});
  for (int i = 0; i < n_afferents; ++i) {
    for (double t = Exponential(rng, envelope); t <= profile.duration;
         t += Exponential(rng, envelope)) {
      if (Uniform01(rng) * envelope < profile.Rate(t)) p.spikes[i].push_back(t);
    }
  }
  return p;
}

namespace {

double AdaptiveSimpson(const std::function<double(double)>& f, double a,
                       double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return AdaptiveSimpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         AdaptiveSimpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double MatchedHomogeneousRate(const RateProfile& profile) {
  profile.Validate();
  const auto f = [&profile](double t) { return profile.Rate(t); };
  const double T = profile.duration;
  // Split at peak centers so narrow bumps are never stepped over.
  std::vector<double> knots = {0.0, T};
  for (const auto& p : profile.peaks) {
    const double c = p.center_ms * 1e-3;
    if (c > 0.0 && c < T) knots.push_back(c);
  }
  std::sort(knots.begin(), knots.end());
  const double scale = std::max(profile.Envelope(), 1e-300) * T;
  double total = 0.0;
  for (size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k], b = knots[k + 1];
    if (b <= a) continue;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += AdaptiveSimpson(f, a, b, fa, fm, fb, whole, 1e-12 * scale, 50);
  }
  return total / T;
}

}  // namespace spikesound
