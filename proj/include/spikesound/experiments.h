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

// Synthetic spike-pattern experiments: learning efficiency of the three
// rules, template classification under jitter/deletion noise, and learning
// of inhomogeneous firing statistics.

#ifndef SPIKESOUND_EXPERIMENTS_H_
#define SPIKESOUND_EXPERIMENTS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spikesound/learning.h"
#include "spikesound/neuron.h"
#include "spikesound/readout.h"
#include "spikesound/sts.h"
#include "spikesound/synthetic.h"

namespace spikesound {

// Epochs needed to reach an exact output count from different initial mean
// weights. One epoch is one presentation of the single pattern.
struct BenchRulesConfig {
  int n_afferents = 100;
  double rate_hz = 8.0;
  double duration_s = 1.0;
  // The threshold scales with N so the drive-to-threshold ratio matches the
  // N = 500, threshold 1 setting.
  NeuronParams params = NeuronParams::Make(20.0, 5.0, 0.2);
  double lambda = 1e-4;
  double momentum = 0.9;
  double init_std = 0.01;
  std::vector<double> init_means = {0.001, 0.002, 0.004, 0.006, 0.008,
                                    0.01,  0.015, 0.02};
  int target_spikes = 20;
  std::vector<double> psd_zetas_ms = {5.0, 10.0};
  std::vector<Rule> rules = {Rule::kTdp, Rule::kPsd};
  int seeds = 20;
  int max_epochs = 500;
  uint64_t seed = 1;
  int threads = 1;
};

struct BenchRow {
  Rule rule = Rule::kTdp;
  double zeta_ms = 0.0;  // PSD only
  double init_mean = 0.0;
  int seed = 0;
  int epochs = 0;
  bool converged = false;
};

std::vector<BenchRow> BenchRules(const BenchRulesConfig& cfg);
void WriteBenchCsv(std::ostream& os, const std::vector<BenchRow>& rows);

// Mean epochs per (rule, zeta, init_mean), in the row order of first use.
struct BenchSummary {
  Rule rule;
  double zeta_ms;
  double init_mean;
  double mean_epochs;
  double converged_fraction;
};
std::vector<BenchSummary> SummarizeBench(const std::vector<BenchRow>& rows);

// Template patterns with jitter or deletion noise.
struct SyntheticClassConfig {
  int n_afferents = 500;
  double rate_hz = 2.0;
  double duration_s = 0.5;
  int n_classes = 3;
  NeuronParams params = NeuronParams::Make(20.0, 5.0, 1.0);
  double lambda = 1e-4;
  double momentum = 0.9;
  double init_mean = 0.0;
  double init_std = 0.001;
  int train_per_class = 10;  // fresh noisy instances per epoch
  int max_epochs = 100;
  int test_per_class = 50;
  NoiseSpec train_jitter{2.0, 0.0};
  NoiseSpec train_deletion{0.0, 0.1};
  std::vector<double> jitter_levels_ms = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> deletion_levels = {0, 0.1, 0.2, 0.3, 0.4, 0.5};
  int tdp_target_lo = 20;
  int psd_spikes = 4;
  std::vector<Rule> rules = {Rule::kTempotron, Rule::kPsd, Rule::kTdp};
  int seeds = 50;
  uint64_t seed = 1;
  int threads = 1;
};

struct SyntheticRow {
  std::string noise_type;  // "jitter" or "deletion"
  double level = 0.0;
  Rule rule = Rule::kTdp;
  Scheme scheme = Scheme::kWta;
  int seed = 0;
  double accuracy = 0.0;
};

// k * T / (n + 1), k = 1..n.
std::vector<double> EvenlySpacedTimes(int n, double duration_s);

// Learning config of one rule for the template task.
LearningConfig SyntheticLearningConfig(const SyntheticClassConfig& cfg, Rule rule);

std::vector<SyntheticRow> ClassifySynthetic(const SyntheticClassConfig& cfg);
void WriteSyntheticCsv(std::ostream& os, const std::vector<SyntheticRow>& rows);

// Mean accuracy over seeds for one (noise_type, level, rule, scheme).
double MeanAccuracy(const std::vector<SyntheticRow>& rows,
                    const std::string& noise_type, double level, Rule rule,
                    Scheme scheme);

// Inhomogeneous (target) versus matched homogeneous (null) rate patterns,
// trained with TDP to fire at least n_d spikes for the target only.
struct InhomogConfig {
  int n_afferents = 500;
  RateProfile profile = RateProfile::TwoPeak();
  NeuronParams params = NeuronParams::Make(20.0, 5.0, 1.0);
  double lambda = 1e-4;
  double momentum = 0.9;
  double init_mean = 0.0;
  double init_std = 0.001;
  std::vector<int> n_d = {1, 2, 3, 4};
  int runs = 500;
  int train_per_class = 10;
  int max_epochs = 50;
  int test_per_class = 10;
  double window_ms = 60.0;  // half width around each peak center
  uint64_t seed = 1;
  int threads = 1;
};

struct InhomogRun {
  int n_d = 0;
  int run = 0;
  int epochs = 0;
  double target_mean_out = 0.0;
  double null_mean_out = 0.0;
  int target_spikes = 0;
  int target_in_window = 0;
  std::vector<double> target_times;  // s, all test output spikes
  std::vector<double> null_times;
};

std::vector<InhomogRun> Inhomog(const InhomogConfig& cfg);

struct InhomogSummary {
  int n_d = 0;
  double target_mean_out = 0.0;
  double null_mean_out = 0.0;
  double in_window_fraction = 0.0;
};
std::vector<InhomogSummary> SummarizeInhomog(const std::vector<InhomogRun>& runs);

// `n_d,run,epochs,target_mean_out,null_mean_out,in_window_fraction`.
void WriteInhomogCsv(std::ostream& os, const std::vector<InhomogRun>& runs);
// `n_d,class,bin_start_s,count` with 10 ms bins.
void WriteInhomogHistogramCsv(std::ostream& os, const std::vector<InhomogRun>& runs,
                              double duration_s);

// Audit of the critical thresholds on random small patterns: bracketing of
// every defined theta*_k by simulation, monotonicity in k, and the analytic
// gradient against central differences for one sampled k per case.
struct StsCheckConfig {
  int cases = 200;
  int max_afferents = 50;
  double max_duration_s = 0.5;
  int k_max = 10;       // bracketing range
  int grad_k_max = 5;   // gradient k is drawn from the defined k <= this
  NeuronParams params = NeuronParams::Make(20.0, 5.0, 1.0);
  double bracket_rel = 1e-4;
  double grad_rel_tol = 0.01;
  double grad_abs_tol = 1e-6;
  uint64_t seed = 1;
  int threads = 1;
};

// Random case `index`: N in [10, max_afferents], T in [0.1 s, max_duration],
// rates 5..40 Hz, weights scaled so the total drive is about ten kernel
// peaks.
struct StsCase {
  SpikePattern pattern;
  Eigen::VectorXd w;
};
StsCase MakeStsCase(const StsCheckConfig& cfg, int index);

struct StsCheckRow {
  int case_id = 0;
  int k = 0;
  double theta_star = 0.0;  // NaN when undefined
  bool bracket_ok = false;  // also false when theta*_k > theta*_{k-1}
  bool gradient_checked = false;
  double grad_max_rel_err = 0.0;  // max_i |a - fd| / max(|fd|, abs_tol / rel_tol)
  bool degenerate = false;        // analytic gradient flagged non-differentiable
  std::string reason;
};

std::vector<StsCheckRow> StsCheck(const StsCheckConfig& cfg);
void WriteStsCheckCsv(std::ostream& os, const std::vector<StsCheckRow>& rows);

}  // namespace spikesound

#endif  // SPIKESOUND_EXPERIMENTS_H_
