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

// Readout schemes, the sound-classification harness (noise conditions, early
// decision, target spike number and training-ratio sweeps) and the burst
// detector for continuous streams.

#ifndef SPIKESOUND_READOUT_H_
#define SPIKESOUND_READOUT_H_

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spikesound/audio.h"
#include "spikesound/encoding.h"
#include "spikesound/learning.h"
#include "spikesound/neuron.h"
#include "spikesound/spike_pattern.h"

namespace spikesound {

struct NeuronResponse {
  int n_out = 0;
  double v_max = 0.0;  // peak of the reset-free potential
  std::vector<double> output_spikes;  // s
};

using ResponseVector = std::vector<NeuronResponse>;

// Simulates every class neuron. Tempotron neurons report n_out = 1 if the
// reset-free maximum reaches threshold, else 0.
ResponseVector Respond(const Model& model, const SpikePattern& pattern);

enum class Scheme { kAbs, kWta };

std::string SchemeName(Scheme scheme);
Scheme ParseScheme(const std::string& name);

inline constexpr int kReject = -1;

// Critical output count used by `abs` when none is configured.
int DefaultCritical(Rule rule);

struct ReadoutConfig {
  Scheme scheme = Scheme::kWta;
  int critical = -1;  // < 0 selects DefaultCritical(rule)
  double distance_tau_ms = -1.0;  // <= 0 selects the model's tau_m
};

// Unique class whose neuron reaches `critical` spikes, else kReject.
int ClassifyAbs(const ResponseVector& r, Rule rule, int critical);

struct WtaDecision {
  int label = kReject;
  bool tie = false;  // fell through to the lowest-index tie break
};

// TDP: max n_out, then max v_max, then lowest index. Tempotron: max v_max.
// PSD: min spike distance to `desired_times`.
WtaDecision ClassifyWta(const ResponseVector& r, Rule rule,
                        const std::vector<double>& desired_times = {},
                        double tau_ms = 10.0);

struct Decision {
  int label = kReject;
  bool tie = false;
};

Decision Classify(const Model& model, const ResponseVector& r,
                  const ReadoutConfig& readout);

// Accuracy and confusion over a labeled pattern set. The confusion matrix
// has one extra trailing column for rejections.
struct PatternEval {
  double accuracy = 0.0;  // percent
  Eigen::MatrixXi confusion;
  int ties = 0;
};

PatternEval EvaluatePatterns(const Model& model,
                             const std::vector<SpikePattern>& patterns,
                             const std::vector<int>& labels,
                             const ReadoutConfig& readout, int threads = 1);

// Same, from precomputed responses.
PatternEval EvaluateResponses(const Model& model,
                              const std::vector<ResponseVector>& responses,
                              const std::vector<int>& labels,
                              const ReadoutConfig& readout);

// A test condition: clean, or additive noise at snr_db.
struct Condition {
  std::string name;
  double snr_db = std::numeric_limits<double>::infinity();
  bool clean() const { return std::isinf(snr_db); }
};

// "clean" or a number of dB ("20", "-5", "0dB").
Condition ParseCondition(const std::string& text);
std::vector<Condition> ParseConditions(const std::string& comma_list);
std::vector<Condition> DefaultTestConditions();  // clean, 20, 10, 0, -5

struct EvalReport {
  std::vector<std::string> conditions;
  Eigen::MatrixXd accuracy;  // runs x conditions, percent
  std::vector<Eigen::MatrixXi> confusion;  // per condition, summed over runs
  int ties = 0;

  int runs() const { return static_cast<int>(accuracy.rows()); }
  // Mean over runs for one condition.
  double Mean(int condition) const;
  // Mean over conditions, each weighted equally.
  double Avg() const;

  void Append(const EvalReport& run);
  // `condition,run,accuracy` rows.
  void WriteCsv(std::ostream& os) const;
  void WriteConfusionCsv(std::ostream& os, int condition,
                         const std::vector<std::string>& labels) const;
};

// Index of each clip label in `labels`; throws DataError for unknown labels.
std::vector<int> LabelIndices(const std::vector<LabeledClip>& clips,
                              const std::vector<std::string>& labels);

struct SoundTaskConfig {
  EncodingConfig encoding;
  NeuronParams params = NeuronParams::Make(40.0, 10.0, 1.0);
  LearningConfig learning;
  ReadoutConfig readout;
  // Multi-condition training samples one of these per visit.
  bool multi_condition = false;
  std::vector<Condition> train_conditions = {{"clean"}, {"20", 20.0}, {"10", 10.0}};
  int threads = 1;
};

// Encodes `clip` under `condition`; the noise segment is chosen by `seed`.
SpikePattern EncodeUnderCondition(const Waveform& clip, const Waveform& noise,
                                  const Condition& condition,
                                  const EncodingConfig& cfg, uint64_t seed);

Model TrainSoundModel(const std::vector<LabeledClip>& train,
                      const std::vector<std::string>& labels,
                      const Waveform& noise, const SoundTaskConfig& cfg,
                      uint64_t seed);

// Trains only the neuron of class `target` (as TrainSoundModel would).
Eigen::VectorXd TrainSoundNeuron(const std::vector<LabeledClip>& train,
                                 const std::vector<std::string>& labels,
                                 const Waveform& noise, const SoundTaskConfig& cfg,
                                 int target, uint64_t seed);

// One run: every clip under every condition. `presence` keeps only spikes up
// to presence * duration.
EvalReport Evaluate(const Model& model, const std::vector<LabeledClip>& clips,
                    const std::vector<Condition>& conditions,
                    const Waveform& noise, const SoundTaskConfig& cfg,
                    uint64_t seed, double presence = 1.0);

// Per-class random halves (sorted by index) for train and test.
struct Split {
  std::vector<LabeledClip> train;
  std::vector<LabeledClip> test;
};
Split SplitPerClass(const std::vector<LabeledClip>& clips,
                    const std::vector<std::string>& labels, double train_fraction,
                    uint64_t seed);

// Per-class subsample keeping round(ratio * n) items, at least one.
std::vector<LabeledClip> SubsamplePerClass(const std::vector<LabeledClip>& clips,
                                           const std::vector<std::string>& labels,
                                           double ratio, uint64_t seed);

// Shared driver: `runs` independent splits, each trained and evaluated.
struct SoundExperiment {
  std::vector<LabeledClip> corpus;
  std::vector<std::string> labels;
  Waveform noise;
  SoundTaskConfig task;
  int runs = 10;
  uint64_t seed = 0;
};

EvalReport RunMismatched(const SoundExperiment& exp,
                         const std::vector<Condition>& conditions);

// Accuracy (mean over runs) per presence ratio, under one condition.
std::vector<double> EarlyDecisionEval(const SoundExperiment& exp,
                                      const std::vector<double>& ratios,
                                      const Condition& condition);

// Retrains with target range [n_d, inf) for each n_d (exactly one spike for
// n_d = 1); abs readout uses critical = n_d. Returns mean accuracy over conditions and runs.
std::vector<double> NdSweep(const SoundExperiment& exp,
                            const std::vector<int>& n_d,
                            const std::vector<Condition>& conditions);

std::vector<double> TrainRatioEval(const SoundExperiment& exp,
                                   const std::vector<double>& ratios,
                                   const std::vector<Condition>& conditions);

struct Detection {
  double onset = 0.0;   // s
  double offset = 0.0;  // s
  int label = 0;
  int spike_count = 0;  // peak windowed count
};

struct BurstConfig {
  int k = 3;
  double window_s = 0.3;  // +infinity allowed
};

// Opens when >= k spikes fall in a window ending at a spike (onset = first
// of them), closes when the windowed count drops below k / 2 (offset = that
// time, or `end_s` if it never does). Overlapping detections are merged.
std::vector<Detection> DetectBursts(const std::vector<double>& spikes, int label,
                                    const BurstConfig& burst, double end_s);

// Encodes the stream in blocks of the training clip length, simulates the
// target neuron over the whole pattern and detects bursts.
std::vector<Detection> StreamDetect(const Model& model, const Waveform& stream,
                                    const EncodingConfig& cfg, double block_s,
                                    const BurstConfig& burst, int target);

struct DetectionScore {
  int events = 0;
  int hits = 0;
  int false_alarms = 0;
  double minutes = 0.0;
};

// Hits: target events overlapped by a detection. False alarms: detections
// overlapping no target event.
DetectionScore ScoreDetections(const std::vector<Detection>& detections,
                               const std::vector<StreamEvent>& events,
                               const std::string& target_label,
                               double duration_s);

// Streams of held-out target and distractor clips in modulated noise. Each
// run picks a target class, trains its neuron on a fresh split and detects
// the target in one stream.
struct StreamExperiment {
  std::vector<LabeledClip> corpus;
  std::vector<std::string> labels;
  Waveform noise;  // training noise
  SoundTaskConfig task;
  double snr_db = -5.0;
  double duration_s = 60.0;
  int n_targets = 8;
  int n_distractors = 8;
  double block_s = 0.0;  // <= 0 selects the clip duration
  BurstConfig burst;
  // Background of the streams; babble with this many talkers, reseeded per
  // run, when empty.
  Waveform stream_noise;
  int talkers = 32;
  int runs = 10;
  // Run r targets class (first_target + r) mod C, or `target` if >= 0.
  int target = -1;
  int first_target = 0;
  uint64_t seed = 0;
};

struct StreamRun {
  int run = 0;
  int target = 0;
  std::vector<StreamEvent> events;
  std::vector<Detection> detections;
  DetectionScore score;
};

std::vector<StreamRun> RunStreams(const StreamExperiment& exp);

}  // namespace spikesound

#endif  // SPIKESOUND_READOUT_H_
