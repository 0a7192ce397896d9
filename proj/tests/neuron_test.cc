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
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "oracles.h"
#include "spikesound/experiments.h"
#include "spikesound/learning.h"
#include "spikesound/neuron.h"
#include "spikesound/synthetic.h"

namespace spikesound {
namespace {

TEST(NeuronParams, KernelPeaksAtOne) {
  for (auto [tm, ts] : {std::pair{20.0, 5.0}, {40.0, 10.0}, {15.0, 1.0}}) {
    const NeuronParams p = NeuronParams::Make(tm, ts, 1.0);
    const double tp = p.PeakTime();
    EXPECT_NEAR(PspKernel(tp, p), 1.0, 1e-12);
    EXPECT_LT(PspKernel(tp * 0.9, p), 1.0);
    EXPECT_LT(PspKernel(tp * 1.1, p), 1.0);
  }
}

TEST(NeuronParams, KernelIsCausal) {
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  EXPECT_EQ(PspKernel(0.0, p), 0.0);
  EXPECT_EQ(PspKernel(-3.0, p), 0.0);
}

TEST(NeuronParams, RejectsBadConstants) {
  EXPECT_THROW(NeuronParams::Make(5.0, 20.0, 1.0), std::invalid_argument);
  EXPECT_THROW(NeuronParams::Make(20.0, 20.0, 1.0), std::invalid_argument);
  EXPECT_THROW(NeuronParams::Make(20.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(NeuronParams::Make(20.0, 5.0, 0.0), std::invalid_argument);
}

TEST(Simulate, SingleInputReachesWeightAtPeak) {
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  SpikePattern pat(1, 0.2);
  pat.spikes[0] = {0.05};
  Eigen::VectorXd w(1);
  w << 0.7;
  const SimResult r = Simulate(pat, w, p.WithThreshold(INFINITY));
  EXPECT_NEAR(r.v_max, 0.7, 1e-9);
  EXPECT_NEAR(r.t_max, 0.05 + p.PeakTime() * 1e-3, 1e-6);
  EXPECT_EQ(r.n_out, 0);
}

TEST(Simulate, SoftResetLowersPotentialByThreshold) {
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  SpikePattern pat(1, 0.2);
  pat.spikes[0] = {0.01};
  Eigen::VectorXd w(1);
  w << 1.5;
  SimOptions opt;
  opt.record_trace = true;
  opt.trace_step_ms = 0.05;
  const SimResult r = Simulate(pat, w, p, opt);
  ASSERT_EQ(r.n_out, 1);
  const double ts = r.output_spikes[0];
  // Long after the spike the potential is the kernel minus the decayed reset.
  const double t = 0.15;
  const size_t idx = static_cast<size_t>(std::lround(t / r.trace_step));
  ASSERT_LT(idx, r.trace.size());
  const double t_idx = idx * r.trace_step;
  const double expected = 1.5 * PspKernel((t_idx - 0.01) * 1e3, p) -
                          std::exp(-(t_idx - ts) * 1e3 / p.tau_m);
  EXPECT_NEAR(r.trace[idx], expected, 1e-9);
}

TEST(Simulate, ResetFreeMaximumMatchesDirectSum) {
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    const SpikePattern pat = PoissonPattern(30, 10.0, 0.3, 100 + s);
    const Eigen::VectorXd w = InitialWeights(30, 0.05, 0.1, 200 + s);
    const SimResult r = Simulate(pat, w, p.WithThreshold(INFINITY));
    const double direct =
        oracle::DirectPotential(pat, w, p.tau_m, p.tau_s, r.t_max * 1e3);
    EXPECT_NEAR(r.v_max, direct, 1e-9);
    // No grid point exceeds the reported maximum.
    for (double t = 0.0; t < 400.0; t += 0.25) {
      EXPECT_LE(oracle::DirectPotential(pat, w, p.tau_m, p.tau_s, t), r.v_max + 1e-9);
    }
  }
}

TEST(Simulate, MatchesDenseGridOracle) {
  StsCheckConfig cfg;
  cfg.max_afferents = 30;
  cfg.max_duration_s = 0.3;
  int cases = 0, agree = 0;
  for (int i = 0; i < 20; ++i) {
    const StsCase c = MakeStsCase(cfg, i);
    const NeuronParams p = NeuronParams::Make(20.0, 5.0, 1.0);
    const SimResult r = Simulate(c.pattern, c.w, p);
    const std::vector<double> ref =
        oracle::DenseGridSpikes(c.pattern, c.w, 20.0, 5.0, 1.0, 1e-3, 200.0);
    ++cases;
    if (static_cast<int>(ref.size()) != r.n_out) continue;
    bool ok = true;
    for (size_t j = 0; j < ref.size(); ++j) {
      ok = ok && std::abs(ref[j] - r.output_spikes[j] * 1e3) <= 1e-3;
    }
    agree += ok;
  }
  EXPECT_GE(agree, cases - 1);
}

TEST(Simulate, CountSpikesAgreesAndCaps) {
  const NeuronParams p = NeuronParams::Make(20.0, 5.0, 0.5);
  const SpikePattern pat = PoissonPattern(50, 20.0, 0.5, 7);
  const Eigen::VectorXd w = InitialWeights(50, 0.05, 0.02, 8);
  const InputEvents ev = BuildEvents(pat, w);
  const SimResult r = Simulate(ev, p);
  ASSERT_GT(r.n_out, 3);
  EXPECT_EQ(CountSpikes(ev, p), r.n_out);
  EXPECT_EQ(CountSpikes(ev, p, 2), 2);
  SimOptions opt;
  opt.max_spikes = 2;
  const SimResult cut = Simulate(ev, p, opt);
  EXPECT_EQ(cut.n_out, 2);
  EXPECT_TRUE(cut.truncated);
}

TEST(Simulate, CountIsNonIncreasingInThreshold) {
  const SpikePattern pat = PoissonPattern(40, 15.0, 0.4, 9);
  const Eigen::VectorXd w = InitialWeights(40, 0.04, 0.03, 10);
  const InputEvents ev = BuildEvents(pat, w);
  int prev = 1 << 30;
  for (double theta = 0.05; theta < 3.0; theta *= 1.2) {
    const int n = CountSpikes(ev, NeuronParams::Make(20.0, 5.0, theta));
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(Simulate, BuildEventsMergesCoincidentSpikes) {
  SpikePattern pat(3, 0.1);
  pat.spikes[0] = {0.01, 0.02};
  pat.spikes[1] = {0.02};
  pat.spikes[2] = {0.05};
  Eigen::VectorXd w(3);
  w << 0.1, 0.2, 0.3;
  const InputEvents ev = BuildEvents(pat, w);
  ASSERT_EQ(ev.time_ms.size(), 3u);
  EXPECT_NEAR(ev.weight[1], 0.3, 1e-15);
}

TEST(Simulate, RejectsWeightSizeMismatch) {
  SpikePattern pat(3, 0.1);
  EXPECT_THROW(Simulate(pat, Eigen::VectorXd::Zero(2), NeuronParams{}),
               std::invalid_argument);
}

TEST(Simulate, EmptyPatternIsSilent) {
  const SimResult r = Simulate(SpikePattern(4, 0.5), Eigen::VectorXd::Ones(4),
                               NeuronParams::Make(20.0, 5.0, 1.0));
  EXPECT_EQ(r.n_out, 0);
  EXPECT_EQ(r.v_max, 0.0);
}

}  // namespace
}  // namespace spikesound
