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

#include <cmath>
#include <optional>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "spikesound/experiments.h"
#include "spikesound/neuron.h"
#include "spikesound/sts.h"

namespace spikesound {
namespace {

StsCheckConfig SmallCases() {
  StsCheckConfig cfg;
  cfg.max_afferents = 30;
  cfg.max_duration_s = 0.3;
  return cfg;
}

TEST(CriticalThreshold, BracketsTheCountTransition) {
  const StsCheckConfig cfg = SmallCases();
  for (int i = 0; i < 15; ++i) {
    const StsCase c = MakeStsCase(cfg, i);
    const InputEvents ev = BuildEvents(c.pattern, c.w);
    for (int k = 1; k <= 6; ++k) {
      const auto cp = FindCriticalThreshold(ev, cfg.params, k, 1e-12);
      if (!cp) continue;
      EXPECT_GE(CountSpikes(ev, cfg.params.WithThreshold(cp->value * (1 - 1e-6))), k);
      EXPECT_LT(CountSpikes(ev, cfg.params.WithThreshold(cp->value * (1 + 1e-6))), k);
    }
  }
}

TEST(CriticalThreshold, FirstEqualsResetFreeMaximum) {
  const StsCase c = MakeStsCase(SmallCases(), 3);
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  const auto t1 = CriticalThreshold(c.pattern, c.w, 1, p, 1e-12);
  ASSERT_TRUE(t1.has_value());
  EXPECT_NEAR(*t1, Simulate(c.pattern, c.w, p.WithThreshold(INFINITY)).v_max, 1e-9);
}

TEST(CriticalThreshold, SingleInputSpike) {
  SpikePattern pat(1, 0.1);
  pat.spikes[0] = {0.02};
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(1, 0.7);
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  EXPECT_NEAR(*CriticalThreshold(pat, w, 1, p, 1e-12), 0.7, 1e-9);
  // The soft reset decays, so a low threshold lets one PSP cross twice.
  const auto t2 = CriticalThreshold(pat, w, 2, p, 1e-12);
  ASSERT_TRUE(t2.has_value());
  EXPECT_LT(*t2, 0.7);
  EXPECT_GE(Simulate(pat, w, p.WithThreshold(*t2 * 0.999)).n_out, 2);
}

TEST(CriticalThreshold, UndefinedForSilentInput) {
  SpikePattern pat(2, 0.1);
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  EXPECT_FALSE(CriticalThreshold(pat, Eigen::VectorXd::Ones(2), 1, p).has_value());
  pat.spikes[0] = {0.02};
  EXPECT_FALSE(CriticalThreshold(pat, -Eigen::VectorXd::Ones(2), 1, p).has_value());
}

TEST(StsProfile, IsNonIncreasingAndPredictsCounts) {
  const StsCheckConfig cfg = SmallCases();
  for (int i = 0; i < 10; ++i) {
    const StsCase c = MakeStsCase(cfg, i);
    const StsProfile prof = ComputeStsProfile(c.pattern, c.w, 8, cfg.params, 1e-12);
    for (int k = 1; k < 8; ++k) {
      if (prof.critical[k] && prof.critical[k - 1]) {
        EXPECT_LE(*prof.critical[k], *prof.critical[k - 1]);
      }
    }
    const InputEvents ev = BuildEvents(c.pattern, c.w);
    for (double theta : {0.3, 0.7, 1.0, 1.6}) {
      const int n = CountSpikes(ev, cfg.params.WithThreshold(theta), 9);
      if (n < 8) EXPECT_EQ(prof.CountAt(theta), n) << "case " << i << " theta " << theta;
    }
  }
}

TEST(CriticalGradient, MatchesFiniteDifferences) {
  const StsCheckConfig cfg = SmallCases();
  int checked = 0;
  for (int i = 0; i < 12; ++i) {
    const StsCase c = MakeStsCase(cfg, i);
    for (int k = 1; k <= 3; ++k) {
      if (!CriticalThreshold(c.pattern, c.w, k, cfg.params)) continue;
      const CriticalGradient g = CriticalThresholdGrad(c.pattern, c.w, k, cfg.params);
      if (!g.differentiable) continue;
      const FdGradient fd = FdGradientOracle(c.pattern, c.w, k, cfg.params);
      for (int j = 0; j < c.w.size(); ++j) {
        if (!fd.available[j]) continue;
        EXPECT_NEAR(g.dtheta_dw[j], fd.value[j],
                    std::max(1e-6, 0.01 * std::abs(fd.value[j])))
            << "case " << i << " k " << k << " afferent " << j;
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(CriticalGradient, FirstThresholdGradientIsKernelSumAtPeak) {
  const StsCase c = MakeStsCase(SmallCases(), 5);
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  const CriticalGradient g = CriticalThresholdGrad(c.pattern, c.w, 1, p);
  ASSERT_TRUE(g.differentiable);
  const double t_max = Simulate(c.pattern, c.w, p.WithThreshold(INFINITY)).t_max;
  for (int i = 0; i < c.pattern.n_afferents; ++i) {
    double expected = 0.0;
    for (double s : c.pattern.spikes[i]) expected += PspKernel((t_max - s) * 1e3, p);
    EXPECT_NEAR(g.dtheta_dw[i], expected, 1e-6);
  }
}

TEST(CriticalGradient, ThrowsWhenUndefined) {
  SpikePattern pat(2, 0.1);
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  EXPECT_THROW(CriticalThresholdGrad(pat, Eigen::VectorXd::Ones(2), 1, p),
               std::invalid_argument);
  pat.spikes[0] = {0.02};
  EXPECT_THROW(CriticalThresholdGrad(pat, Eigen::VectorXd::Ones(2), 0, p),
               std::invalid_argument);
}

TEST(CriticalGradient, FallbackReturnsFiniteVector) {
  const StsCase c = MakeStsCase(SmallCases(), 7);
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  bool used = true;
  const Eigen::VectorXd g = CriticalGradientOrFallback(c.pattern, c.w, 1, p, &used);
  EXPECT_TRUE(g.allFinite());
  EXPECT_EQ(g.size(), c.w.size());
}

}  // namespace
}  // namespace spikesound
