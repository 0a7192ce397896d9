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
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "spikesound/audio.h"
#include "spikesound/learning.h"
#include "spikesound/readout.h"
#include "spikesound/synthetic.h"

namespace spikesound {
namespace {

NeuronResponse R(int n, double v, std::vector<double> spikes = {}) {
  return NeuronResponse{n, v, std::move(spikes)};
}

TEST(Abs, UniqueNeuronReachingCritical) {
  EXPECT_EQ(ClassifyAbs({R(0, 0.2), R(12, 2.0), R(3, 1.1)}, Rule::kTdp, 10), 1);
  EXPECT_EQ(ClassifyAbs({R(10, 2.0), R(12, 2.0)}, Rule::kTdp, 10), kReject);
  EXPECT_EQ(ClassifyAbs({R(9, 2.0), R(0, 0.0)}, Rule::kTdp, 10), kReject);
  EXPECT_EQ(ClassifyAbs({R(0, 0.5), R(1, 1.2)}, Rule::kTempotron, 1), 1);
}

TEST(Wta, TdpUsesCountThenPeak) {
  WtaDecision d = ClassifyWta({R(5, 3.0), R(7, 2.0), R(7, 2.5)}, Rule::kTdp);
  EXPECT_EQ(d.label, 2);
  EXPECT_FALSE(d.tie);
  d = ClassifyWta({R(0, 0.5), R(0, 0.5)}, Rule::kTdp);
  EXPECT_EQ(d.label, 0);
  EXPECT_TRUE(d.tie);
}

TEST(Readout, ReferenceExamples) {
  EXPECT_EQ(ClassifyAbs({R(12, 0), R(0, 0), R(0, 0)}, Rule::kTdp, 10), 0);
  EXPECT_EQ(ClassifyAbs({R(12, 0), R(11, 0), R(0, 0)}, Rule::kTdp, 10), kReject);
  EXPECT_EQ(ClassifyAbs({R(0, 0), R(0, 0), R(0, 0)}, Rule::kTdp, 10), kReject);
  EXPECT_EQ(ClassifyWta({R(3, 0), R(5, 0), R(2, 0)}, Rule::kTdp).label, 1);
  EXPECT_EQ(ClassifyWta({R(5, 0.9), R(5, 1.4), R(2, 0)}, Rule::kTdp).label, 1);
  EXPECT_EQ(ClassifyWta({R(0, 0.2), R(0, 0.8), R(0, 0.5)}, Rule::kTempotron).label, 1);
}

TEST(Wta, TempotronUsesPeak) {
  EXPECT_EQ(ClassifyWta({R(1, 1.5), R(0, 0.9), R(1, 1.7)}, Rule::kTempotron).label, 2);
}

TEST(Wta, PsdUsesDistanceToDesiredTrain) {
  const std::vector<double> desired = {0.1, 0.2};
  const ResponseVector r = {R(1, 1.0, {0.1}), R(2, 1.0, {0.101, 0.199}),
                            R(3, 1.0, {0.1, 0.2, 0.3})};
  EXPECT_EQ(ClassifyWta(r, Rule::kPsd, desired, 10.0).label, 1);
}

TEST(Respond, TempotronReportsBinaryDecision) {
  Model m;
  m.labels = {"a", "b"};
  m.rule = Rule::kTempotron;
  m.params = NeuronParams::Make(20.0, 5.0, 1.0);
  SpikePattern p(1, 0.1);
  p.spikes[0] = {0.01};
  m.weights = {Eigen::VectorXd::Constant(1, 2.5), Eigen::VectorXd::Constant(1, 0.5)};
  const ResponseVector r = Respond(m, p);
  EXPECT_EQ(r[0].n_out, 1);
  EXPECT_NEAR(r[0].v_max, 2.5, 1e-9);
  EXPECT_EQ(r[1].n_out, 0);
  EXPECT_NEAR(r[1].v_max, 0.5, 1e-9);
  m.rule = Rule::kTdp;
  const ResponseVector t = Respond(m, p);
  EXPECT_GE(t[0].n_out, 2);
  EXPECT_EQ(t[0].n_out, Simulate(p, m.weights[0], m.params).n_out);
  EXPECT_NEAR(t[0].v_max, 2.5, 1e-9);
}

TEST(Conditions, Parse) {
  EXPECT_TRUE(ParseCondition("clean").clean());
  EXPECT_DOUBLE_EQ(ParseCondition("-5").snr_db, -5.0);
  EXPECT_DOUBLE_EQ(ParseCondition("10dB").snr_db, 10.0);
  EXPECT_THROW(ParseCondition("loud"), std::invalid_argument);
  EXPECT_THROW(ParseCondition("5x"), std::invalid_argument);
  EXPECT_EQ(ParseConditions("clean, 20,0").size(), 3u);
  EXPECT_EQ(DefaultTestConditions().size(), 5u);
}

TEST(EvalReport, AveragesAndCsv) {
  EvalReport a;
  a.conditions = {"clean", "0"};
  a.accuracy = Eigen::MatrixXd(1, 2);
  a.accuracy << 100.0, 50.0;
  a.confusion = {Eigen::MatrixXi::Zero(2, 3), Eigen::MatrixXi::Zero(2, 3)};
  EvalReport b = a;
  b.accuracy << 90.0, 70.0;
  a.Append(b);
  EXPECT_EQ(a.runs(), 2);
  EXPECT_DOUBLE_EQ(a.Mean(0), 95.0);
  EXPECT_DOUBLE_EQ(a.Avg(), 77.5);
  std::ostringstream os;
  a.WriteCsv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "condition,run,accuracy");
}

TEST(Split, PerClassHalvesAreDisjointAndSeeded) {
  const auto clips = SynthCorpus(3, 6, 0.3, 1);
  const std::vector<std::string> labels(SynthClassNames().begin(), SynthClassNames().begin() + 3);
  const Split s = SplitPerClass(clips, labels, 0.5, 4);
  EXPECT_EQ(s.train.size(), 9u);
  EXPECT_EQ(s.test.size(), 9u);
  std::set<std::string> ids;
  for (const auto& c : s.train) ids.insert(c.source_id);
  for (const auto& c : s.test) EXPECT_FALSE(ids.count(c.source_id));
  const Split again = SplitPerClass(clips, labels, 0.5, 4);
  for (size_t i = 0; i < s.train.size(); ++i) {
    EXPECT_EQ(s.train[i].source_id, again.train[i].source_id);
  }
  const auto sub = SubsamplePerClass(s.train, labels, 0.1, 2);
  EXPECT_EQ(sub.size(), 3u);  // at least one per class
  EXPECT_THROW(LabelIndices(clips, {"phone"}), DataError);
}

TEST(EncodeUnderCondition, CleanIgnoresNoiseAndNoisyIsSeeded) {
  const auto clips = SynthCorpus(2, 1, 0.5, 3);
  const Waveform noise = BabbleNoise(2.0, 1);
  const EncodingConfig cfg;
  EXPECT_EQ(EncodeUnderCondition(clips[0].waveform, noise, {"clean"}, cfg, 1),
            Encode(clips[0].waveform, cfg));
  const Condition c{"0", 0.0};
  EXPECT_EQ(EncodeUnderCondition(clips[0].waveform, noise, c, cfg, 5),
            EncodeUnderCondition(clips[0].waveform, noise, c, cfg, 5));
}

TEST(Bursts, OpensAtKSpikesAndClosesBelowHalf) {
  const BurstConfig b{3, 0.1};
  const auto d = DetectBursts({1.00, 1.02, 1.04, 1.06, 2.0}, 0, b, 5.0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].onset, 1.00);
  // Count drops below 1.5 when 1.04 leaves the window.
  EXPECT_NEAR(d[0].offset, 1.14, 1e-12);
  EXPECT_EQ(d[0].spike_count, 4);
  EXPECT_TRUE(DetectBursts({1.0, 1.2, 1.4}, 0, b, 5.0).empty());
  EXPECT_THROW(DetectBursts({}, 0, {0, 0.1}, 1.0), std::invalid_argument);
}

TEST(Bursts, DetectionsAreDisjointAndContainKSpikes) {
  const SpikePattern p = PoissonPattern(1, 20.0, 30.0, 8);
  const std::vector<double>& spikes = p.spikes[0];
  for (const BurstConfig b : {BurstConfig{3, 0.2}, BurstConfig{5, 0.3}, BurstConfig{2, 0.05}}) {
    const auto d = DetectBursts(spikes, 1, b, 30.0);
    ASSERT_FALSE(d.empty());
    for (size_t i = 0; i < d.size(); ++i) {
      if (i > 0) EXPECT_GT(d[i].onset, d[i - 1].offset);
      bool burst = false;
      for (double t : spikes) {
        if (t < d[i].onset || t > d[i].offset) continue;
        int n = 0;
        for (double s : spikes) n += s > t - b.window_s && s <= t;
        burst = burst || n >= b.k;
      }
      EXPECT_TRUE(burst);
    }
  }
}

TEST(Bursts, InfiniteWindowRunsToTheEnd) {
  const auto d = DetectBursts({1.0, 2.0, 3.0}, 0, {3, INFINITY}, 10.0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].onset, 1.0);
  EXPECT_DOUBLE_EQ(d[0].offset, 10.0);
}

TEST(Score, HitsAndFalseAlarms) {
  const std::vector<StreamEvent> ev = {{1.0, 1.5, "bell"}, {3.0, 3.5, "horn"}, {5.0, 5.5, "bell"}};
  const std::vector<Detection> det = {{1.2, 1.3, 0, 3}, {3.1, 3.2, 0, 3}, {7.0, 7.5, 0, 3}};
  const DetectionScore s = ScoreDetections(det, ev, "bell", 120.0);
  EXPECT_EQ(s.events, 2);
  EXPECT_EQ(s.hits, 1);
  EXPECT_EQ(s.false_alarms, 2);
  EXPECT_DOUBLE_EQ(s.minutes, 2.0);
}

}  // namespace
}  // namespace spikesound
