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

// Supervised rules (tempotron, PSD, TDP), the online training loop and the
// SPKMODEL text format.

#ifndef SPIKESOUND_LEARNING_H_
#define SPIKESOUND_LEARNING_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spikesound/neuron.h"
#include "spikesound/random.h"
#include "spikesound/spike_pattern.h"

namespace spikesound {

enum class Rule { kTempotron, kPsd, kTdp };

std::string RuleName(Rule rule);
// Accepts "tempotron", "psd", "tdp"; throws std::invalid_argument otherwise.
Rule ParseRule(const std::string& name);

inline constexpr int kUnbounded = std::numeric_limits<int>::max();

// Accepted output spike counts, inclusive.
struct SpikeRange {
  int lo = 0;
  int hi = 0;
  bool Contains(int n) const { return n >= lo && n <= hi; }
};

struct LearningConfig {
  Rule rule = Rule::kTdp;
  double lambda = 1e-4;
  double momentum = 0.9;
  double zeta_ms = 10.0;
  SpikeRange target_range{20, kUnbounded};
  SpikeRange null_range{0, 0};
  std::vector<double> desired_times;  // s, PSD target train
  int max_epochs = 100;
  uint64_t seed = 0;
  double init_mean = 0.0;
  double init_std = 0.01;

  void Validate() const;
};

enum class ErrorType { kNone, kTargetMiss, kNullFalseFire };

struct UpdateResult {
  Eigen::VectorXd delta_w;
  bool applied = false;
  ErrorType error_type = ErrorType::kNone;
};

// sum_f K(t - t_i^f) over spikes of afferent i strictly before t (t in s).
Eigen::VectorXd PspSums(const SpikePattern& pattern, double t_s,
                        const NeuronParams& params);

// Tempotron: gradient of the reset-free maximum at t_max.
UpdateResult TempotronUpdate(const SpikePattern& pattern, bool is_target,
                             const Eigen::VectorXd& w,
                             const NeuronParams& params, double lambda);

// One-to-one greedy nearest matching of actual to desired spike times; a pair
// is matched only if |t_o - t_d| <= zeta. Returns pairs (actual, desired)
// index; unmatched indices are those not listed.
std::vector<std::pair<int, int>> MatchSpikes(const std::vector<double>& actual,
                                             const std::vector<double>& desired,
                                             double zeta_s);

// PSD: LTP at unmatched desired times, LTD at unmatched actual times.
UpdateResult PsdUpdate(const SpikePattern& pattern,
                       const std::vector<double>& desired_times,
                       const Eigen::VectorXd& w, const NeuronParams& params,
                       double lambda, double zeta_ms);

// (1/tau) * integral of the squared difference of the exponentially filtered
// trains, in closed form. Times in s, tau in ms.
double SpikeDistance(const std::vector<double>& a, const std::vector<double>& b,
                     double tau_ms);

// TDP: moves theta*_{n_o + 1} up (LTP) or theta*_{n_o} down (LTD) until the
// output count falls in `range`.
UpdateResult TdpUpdate(const SpikePattern& pattern, const Eigen::VectorXd& w,
                       const NeuronParams& params, double lambda,
                       const SpikeRange& range);

// Dispatches on config.rule for a pattern of the given role.
UpdateResult RuleUpdate(const SpikePattern& pattern, bool is_target,
                        const Eigen::VectorXd& w, const NeuronParams& params,
                        const LearningConfig& config);

Eigen::VectorXd InitialWeights(int n, double mean, double stddev, uint64_t seed);

// Items presented to the learner. `draw` returns the pattern for one visit of
// an item; it may resample (fresh noise, new condition) from `rng`.
struct TrainingSet {
  int n_afferents = 0;
  std::vector<int> labels;  // class index per item
  std::function<SpikePattern(size_t item, Rng& rng)> draw;

  size_t size() const { return labels.size(); }
};

// Fixed patterns, identical on every visit.
TrainingSet FixedTrainingSet(std::vector<SpikePattern> patterns,
                             std::vector<int> labels);

struct NeuronTrainResult {
  Eigen::VectorXd w;
  int epochs = 0;
  bool converged = false;  // an epoch finished with zero updates
  long updates = 0;
};

// Online training of the neuron whose target is `target_class`. Each epoch
// visits the items in a seeded shuffled order; on every error trial
// v <- mu * v + dw and w <- w + v. Stops after the first update-free epoch or
// at max_epochs.
NeuronTrainResult TrainNeuron(const TrainingSet& set, int target_class,
                              const LearningConfig& config,
                              const NeuronParams& params, Eigen::VectorXd w0,
                              uint64_t seed);

struct Model {
  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> weights;
  NeuronParams params;
  Rule rule = Rule::kTdp;
  int epochs_run = 0;
  uint64_t seed = 0;
  std::vector<double> desired_times;  // s, PSD only

  int n_classes() const { return static_cast<int>(labels.size()); }
  int n_afferents() const {
    return weights.empty() ? 0 : static_cast<int>(weights[0].size());
  }
};

// The neuron of class `c` exactly as Train builds it (same sub-seeds).
Eigen::VectorXd TrainClassNeuron(const TrainingSet& set, int c,
                                 const LearningConfig& config,
                                 const NeuronParams& params);

// One neuron per class, trained independently (in parallel with threads > 1).
// Sub-seeds are derived per class so results do not depend on threads.
Model Train(const TrainingSet& set, const std::vector<std::string>& class_labels,
            const LearningConfig& config, const NeuronParams& params,
            int threads = 1);

// SPKMODEL v1. Weights are written with 9 significant digits.
void WriteModel(std::ostream& os, const Model& model);
Model ReadModel(std::istream& is);
void SaveModel(const std::string& path, const Model& model);
Model LoadModel(const std::string& path);

}  // namespace spikesound

#endif  // SPIKESOUND_LEARNING_H_
