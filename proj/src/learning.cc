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

#include "spikesound/learning.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>

#include "spikesound/parallel.h"
#include "spikesound/sts.h"

namespace spikesound {

std::string RuleName(Rule rule) {
  switch (rule) {
    case Rule::kTempotron:
      return "tempotron";
    case Rule::kPsd:
      return "psd";
    case Rule::kTdp:
      return "tdp";
  }
  return "unknown";
}

Rule ParseRule(const std::string& name) {
  if (name == "tempotron") return Rule::kTempotron;
  if (name == "psd") return Rule::kPsd;
  if (name == "tdp") return Rule::kTdp;
  throw std::invalid_argument("unknown rule '" + name + "'");
}

void LearningConfig::Validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("learning: lambda must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("learning: momentum must be in [0, 1)");
  }
  if (!(zeta_ms >= 0.0)) throw std::invalid_argument("learning: zeta must be >= 0");
  if (target_range.lo > target_range.hi || null_range.lo > null_range.hi ||
      target_range.lo < 0 || null_range.lo < 0) {
    throw std::invalid_argument("learning: bad desired range");
  }
  if (max_epochs < 1) throw std::invalid_argument("learning: max_epochs < 1");
  if (!(init_std >= 0.0)) throw std::invalid_argument("learning: init_std < 0");
  if (!std::is_sorted(desired_times.begin(), desired_times.end())) {
    throw std::invalid_argument("learning: desired times must be sorted");
  }
}

Eigen::VectorXd PspSums(const SpikePattern& pattern, double t_s,
                        const NeuronParams& params) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(pattern.n_afferents);
  const double t_ms = t_s * 1e3;
  for (int i = 0; i < pattern.n_afferents; ++i) {
    double sum = 0.0;
    for (double s : pattern.spikes[i]) {
      if (s >= t_s) break;
      sum += PspKernel(t_ms - s * 1e3, params);
    }
    out[i] = sum;
  }
  return out;
}

namespace {

UpdateResult NoUpdate(int n) {
  UpdateResult r;
  r.delta_w = Eigen::VectorXd::Zero(n);
  return r;
}

}  // namespace

UpdateResult TempotronUpdate(const SpikePattern& pattern, bool is_target,
                             const Eigen::VectorXd& w,
                             const NeuronParams& params, double lambda) {
  const SimResult free = Simulate(
      pattern, w, params.WithThreshold(std::numeric_limits<double>::infinity()));
  const bool fired = free.v_max >= params.threshold;
  UpdateResult r = NoUpdate(pattern.n_afferents);
  if (is_target == fired) return r;
  const double sign = is_target ? 1.0 : -1.0;
  r.delta_w = sign * lambda * PspSums(pattern, free.t_max, params);
  r.applied = true;
  r.error_type = is_target ? ErrorType::kTargetMiss : ErrorType::kNullFalseFire;
  return r;
}

std::vector<std::pair<int, int>> MatchSpikes(const std::vector<double>& actual,
                                             const std::vector<double>& desired,
                                             double zeta_s) {
  struct Candidate {
    double gap;
    int a, d;
  };
  std::vector<Candidate> candidates;
  for (int a = 0; a < static_cast<int>(actual.size()); ++a) {
    for (int d = 0; d < static_cast<int>(desired.size()); ++d) {
      const double gap = std::abs(actual[a] - desired[d]);
      if (gap <= zeta_s) candidates.push_back({gap, a, d});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.gap != y.gap) return x.gap < y.gap;
              if (x.a != y.a) return x.a < y.a;
              return x.d < y.d;
            });
  std::vector<bool> used_a(actual.size()), used_d(desired.size());
  std::vector<std::pair<int, int>> pairs;
  for (const auto& c : candidates) {
    if (used_a[c.a] || used_d[c.d]) continue;
    used_a[c.a] = used_d[c.d] = true;
    pairs.emplace_back(c.a, c.d);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

UpdateResult PsdUpdate(const SpikePattern& pattern,
                       const std::vector<double>& desired_times,
                       const Eigen::VectorXd& w, const NeuronParams& params,
                       double lambda, double zeta_ms) {
  const SimResult sim = Simulate(pattern, w, params);
  const auto pairs = MatchSpikes(sim.output_spikes, desired_times, zeta_ms * 1e-3);
  std::vector<bool> matched_a(sim.output_spikes.size()),
      matched_d(desired_times.size());
  for (const auto& [a, d] : pairs) matched_a[a] = matched_d[d] = true;

  UpdateResult r = NoUpdate(pattern.n_afferents);
  for (size_t d = 0; d < desired_times.size(); ++d) {
    if (matched_d[d]) continue;
    r.delta_w += lambda * PspSums(pattern, desired_times[d], params);
    r.applied = true;
  }
  for (size_t a = 0; a < sim.output_spikes.size(); ++a) {
    if (matched_a[a]) continue;
    r.delta_w -= lambda * PspSums(pattern, sim.output_spikes[a], params);
    r.applied = true;
  }
  if (r.applied) {
    r.error_type = desired_times.empty() ? ErrorType::kNullFalseFire
                                         : ErrorType::kTargetMiss;
  }
  return r;
}

double SpikeDistance(const std::vector<double>& a, const std::vector<double>& b,
                     double tau_ms) {
  const double tau = tau_ms * 1e-3;
  const auto cross = [tau](const std::vector<double>& x,
                           const std::vector<double>& y) {
    double s = 0.0;
    for (double p : x) {
      for (double q : y) s += std::exp(-std::abs(p - q) / tau);
    }
    return s;
  };
  const double d = 0.5 * (cross(a, a) + cross(b, b) - 2.0 * cross(a, b));
  return std::max(0.0, d);
}

UpdateResult TdpUpdate(const SpikePattern& pattern, const Eigen::VectorXd& w,
                       const NeuronParams& params, double lambda,
                       const SpikeRange& range) {
  UpdateResult r = NoUpdate(pattern.n_afferents);
  const InputEvents events = BuildEvents(pattern, w);
  const int n_out = CountSpikes(events, params);
  if (range.Contains(n_out)) return r;

  const bool ltp = n_out < range.lo;
  const int k = ltp ? n_out + 1 : n_out;
  try {
    const Eigen::VectorXd grad =
        ltp ? CriticalGradientOrFallback(pattern, w, k, params, nullptr,
                                         std::nullopt, params.threshold)
            : CriticalGradientOrFallback(pattern, w, k, params, nullptr,
                                         params.threshold, std::nullopt);
    r.delta_w = (ltp ? lambda : -lambda) * grad;
  } catch (const std::invalid_argument&) {
    // theta*_k undefined: the reset-free potential never turns positive. Push
    // every active afferent up by its total PSP mass instead.
    if (!ltp) return r;
    for (int i = 0; i < pattern.n_afferents; ++i) {
      r.delta_w[i] = lambda * static_cast<double>(pattern.spikes[i].size());
    }
  }
  r.applied = true;
  // RuleUpdate refines this with the pattern's role.
  r.error_type = ltp ? ErrorType::kTargetMiss : ErrorType::kNullFalseFire;
  return r;
}

UpdateResult RuleUpdate(const SpikePattern& pattern, bool is_target,
                        const Eigen::VectorXd& w, const NeuronParams& params,
                        const LearningConfig& config) {
  switch (config.rule) {
    case Rule::kTempotron:
      return TempotronUpdate(pattern, is_target, w, params, config.lambda);
    case Rule::kPsd:
      return PsdUpdate(pattern,
                       is_target ? config.desired_times : std::vector<double>{},
                       w, params, config.lambda, config.zeta_ms);
    case Rule::kTdp: {
      UpdateResult r =
          TdpUpdate(pattern, w, params, config.lambda,
                    is_target ? config.target_range : config.null_range);
      if (r.applied) {
        r.error_type =
            is_target ? ErrorType::kTargetMiss : ErrorType::kNullFalseFire;
      }
      return r;
    }
  }
  throw std::logic_error("unreachable rule");
}

Eigen::VectorXd InitialWeights(int n, double mean, double stddev,
                               uint64_t seed) {
  Rng rng = MakeRng(seed, {0x77656967});
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = mean + stddev * gauss(rng);
  return w;
}

TrainingSet FixedTrainingSet(std::vector<SpikePattern> patterns,
                             std::vector<int> labels) {
  if (patterns.size() != labels.size()) {
    throw std::invalid_argument("training set: patterns/labels size mismatch");
  }
  TrainingSet set;
  set.n_afferents = patterns.empty() ? 0 : patterns[0].n_afferents;
  set.labels = std::move(labels);
  auto shared = std::make_shared<std::vector<SpikePattern>>(std::move(patterns));
  set.draw = [shared](size_t item, Rng&) { return (*shared)[item]; };
  return set;
}

namespace {

std::vector<size_t> SeededPermutation(size_t n, Rng& rng) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  for (size_t i = n; i > 1; --i) {
    const size_t j = static_cast<size_t>(Uniform01(rng) * i);
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  return order;
}

}  // namespace

NeuronTrainResult TrainNeuron(const TrainingSet& set, int target_class,
                              const LearningConfig& config,
                              const NeuronParams& params, Eigen::VectorXd w0,
                              uint64_t seed) {
  config.Validate();
  if (set.size() == 0) throw std::invalid_argument("training: empty dataset");
  NeuronTrainResult result;
  result.w = std::move(w0);
  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(result.w.size());
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    Rng order_rng = MakeRng(seed, {0x6f726465, uint64_t(epoch)});
    long epoch_updates = 0;
    for (size_t item : SeededPermutation(set.size(), order_rng)) {
      Rng item_rng = MakeRng(seed, {0x76697369, uint64_t(epoch), item});
      const SpikePattern pattern = set.draw(item, item_rng);
      const bool is_target = set.labels[item] == target_class;
      const UpdateResult u = RuleUpdate(pattern, is_target, result.w, params, config);
      if (!u.applied) continue;
      velocity = config.momentum * velocity + u.delta_w;
      result.w += velocity;
      ++epoch_updates;
    }
    result.epochs = epoch + 1;
    result.updates += epoch_updates;
    if (epoch_updates == 0) {
      result.converged = true;
      break;
    }
  }
  return result;
}

namespace {

NeuronTrainResult TrainClass(const TrainingSet& set, int c,
                             const LearningConfig& config,
                             const NeuronParams& params) {
  const uint64_t class_seed = SubSeed(config.seed, {0x636c6173, uint64_t(c)});
  Eigen::VectorXd w0 = InitialWeights(set.n_afferents, config.init_mean,
                                      config.init_std, SubSeed(class_seed, {1}));
  return TrainNeuron(set, c, config, params, std::move(w0), SubSeed(class_seed, {2}));
}

}  // namespace

Eigen::VectorXd TrainClassNeuron(const TrainingSet& set, int c,
                                 const LearningConfig& config,
                                 const NeuronParams& params) {
  return TrainClass(set, c, config, params).w;
}

Model Train(const TrainingSet& set, const std::vector<std::string>& class_labels,
            const LearningConfig& config, const NeuronParams& params,
            int threads) {
  config.Validate();
  const int n_classes = static_cast<int>(class_labels.size());
  if (n_classes < 2) throw std::invalid_argument("training: need >= 2 classes");
  if (set.size() == 0) throw std::invalid_argument("training: empty dataset");
  std::vector<int> per_class(n_classes, 0);
  for (int label : set.labels) {
    if (label < 0 || label >= n_classes) {
      throw std::invalid_argument("training: label out of range");
    }
    ++per_class[label];
  }
  for (int c = 0; c < n_classes; ++c) {
    if (per_class[c] == 0) {
      throw std::invalid_argument("training: class '" + class_labels[c] +
                                  "' has no samples");
    }
  }

  Model model;
  model.labels = class_labels;
  model.params = params;
  model.rule = config.rule;
  model.seed = config.seed;
  model.desired_times = config.desired_times;
  model.weights.resize(n_classes);
  std::vector<int> epochs(n_classes, 0);
  ParallelFor(n_classes, threads, [&](size_t c) {
    NeuronTrainResult r = TrainClass(set, static_cast<int>(c), config, params);
    model.weights[c] = std::move(r.w);
    epochs[c] = r.epochs;
  });
  model.epochs_run = *std::max_element(epochs.begin(), epochs.end());
  return model;
}

}  // namespace spikesound
