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

#include "spikesound/readout.h"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "spikesound/parallel.h"
#include "spikesound/random.h"

namespace spikesound {

ResponseVector Respond(const Model& model, const SpikePattern& pattern) {
  ResponseVector out(model.n_classes());
  const NeuronParams free_params =
      model.params.WithThreshold(std::numeric_limits<double>::infinity());
  for (int c = 0; c < model.n_classes(); ++c) {
    const InputEvents events = BuildEvents(pattern, model.weights[c]);
    const SimResult free = Simulate(events, free_params);
    out[c].v_max = free.v_max;
    if (model.rule == Rule::kTempotron) {
      out[c].n_out = free.v_max >= model.params.threshold ? 1 : 0;
      if (out[c].n_out) out[c].output_spikes.push_back(free.t_max);
    } else {
      SimResult sim = Simulate(events, model.params);
      out[c].n_out = sim.n_out;
      out[c].output_spikes = std::move(sim.output_spikes);
    }
  }
  return out;
}

std::string SchemeName(Scheme scheme) {
  return scheme == Scheme::kAbs ? "abs" : "wta";
}

Scheme ParseScheme(const std::string& name) {
  if (name == "abs") return Scheme::kAbs;
  if (name == "wta") return Scheme::kWta;
  throw std::invalid_argument("unknown readout scheme '" + name + "'");
}

int DefaultCritical(Rule rule) {
  switch (rule) {
    case Rule::kTempotron:
      return 1;
    case Rule::kPsd:
      return 2;
    case Rule::kTdp:
      return 10;
  }
  return 1;
}

int ClassifyAbs(const ResponseVector& r, Rule rule, int critical) {
  if (critical < 0) throw std::invalid_argument("abs readout: critical < 0");
  const int need = rule == Rule::kTempotron ? 1 : critical;
  int winner = kReject;
  for (int c = 0; c < static_cast<int>(r.size()); ++c) {
    if (r[c].n_out < need) continue;
    if (winner != kReject) return kReject;
    winner = c;
  }
  return winner;
}

WtaDecision ClassifyWta(const ResponseVector& r, Rule rule,
                        const std::vector<double>& desired_times,
                        double tau_ms) {
  WtaDecision d;
  if (r.empty()) return d;
  if (rule == Rule::kPsd) {
    double best = std::numeric_limits<double>::infinity();
    int ties = 0;
    for (int c = 0; c < static_cast<int>(r.size()); ++c) {
      const double dist = SpikeDistance(r[c].output_spikes, desired_times, tau_ms);
      if (dist < best) {
        best = dist;
        d.label = c;
        ties = 0;
      } else if (dist == best) {
        ++ties;
      }
    }
    d.tie = ties > 0;
    return d;
  }
  // Lexicographic (n_out, v_max) for TDP, v_max alone for tempotron.
  const auto key = [rule](const NeuronResponse& x) {
    return std::make_pair(rule == Rule::kTdp ? x.n_out : 0, x.v_max);
  };
  d.label = 0;
  int ties = 0;
  for (int c = 1; c < static_cast<int>(r.size()); ++c) {
    if (key(r[c]) > key(r[d.label])) {
      d.label = c;
      ties = 0;
    } else if (key(r[c]) == key(r[d.label])) {
      ++ties;
    }
  }
  d.tie = ties > 0;
  return d;
}

Decision Classify(const Model& model, const ResponseVector& r,
                  const ReadoutConfig& readout) {
  Decision d;
  if (readout.scheme == Scheme::kAbs) {
    const int critical =
        readout.critical < 0 ? DefaultCritical(model.rule) : readout.critical;
    d.label = ClassifyAbs(r, model.rule, critical);
  } else {
    const WtaDecision w =
        ClassifyWta(r, model.rule, model.desired_times,
                    readout.distance_tau_ms > 0.0 ? readout.distance_tau_ms
                                                  : model.params.tau_m);
    d.label = w.label;
    d.tie = w.tie;
  }
  return d;
}

PatternEval EvaluatePatterns(const Model& model,
                             const std::vector<SpikePattern>& patterns,
                             const std::vector<int>& labels,
                             const ReadoutConfig& readout, int threads) {
  if (patterns.size() != labels.size()) {
    throw std::invalid_argument("evaluate: patterns/labels size mismatch");
  }
  std::vector<ResponseVector> responses(patterns.size());
  ParallelFor(patterns.size(), threads,
              [&](size_t i) { responses[i] = Respond(model, patterns[i]); });
  return EvaluateResponses(model, responses, labels, readout);
}

PatternEval EvaluateResponses(const Model& model,
                              const std::vector<ResponseVector>& responses,
                              const std::vector<int>& labels,
                              const ReadoutConfig& readout) {
  if (responses.size() != labels.size()) {
    throw std::invalid_argument("evaluate: responses/labels size mismatch");
  }
  const int C = model.n_classes();
  PatternEval e;
  e.confusion = Eigen::MatrixXi::Zero(C, C + 1);
  int correct = 0;
  for (size_t i = 0; i < responses.size(); ++i) {
    const Decision d = Classify(model, responses[i], readout);
    e.confusion(labels[i], d.label == kReject ? C : d.label) += 1;
    correct += d.label == labels[i];
    e.ties += d.tie;
  }
  e.accuracy = responses.empty() ? 0.0 : 100.0 * correct / responses.size();
  return e;
}

Condition ParseCondition(const std::string& text) {
  if (text == "clean") return Condition{"clean"};
  std::string num = text;
  if (num.size() > 2 && (num.ends_with("dB") || num.ends_with("db"))) {
    num.resize(num.size() - 2);
  }
  size_t used = 0;
  double snr = 0.0;
  try {
    snr = std::stod(num, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != num.size() || !std::isfinite(snr)) {
    throw std::invalid_argument("bad condition '" + text +
                                "' (expected clean or an SNR in dB)");
  }
  return Condition{num, snr};
}

std::vector<Condition> ParseConditions(const std::string& comma_list) {
  std::vector<Condition> out;
  std::stringstream ss(comma_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(ParseCondition(item));
  }
  if (out.empty()) throw std::invalid_argument("empty condition list");
  return out;
}

std::vector<Condition> DefaultTestConditions() {
  return {{"clean"}, {"20", 20.0}, {"10", 10.0}, {"0", 0.0}, {"-5", -5.0}};
}

double EvalReport::Mean(int condition) const {
  return accuracy.rows() ? accuracy.col(condition).mean() : 0.0;
}

double EvalReport::Avg() const {
  if (accuracy.size() == 0) return 0.0;
  return accuracy.colwise().mean().mean();
}

void EvalReport::Append(const EvalReport& run) {
  if (conditions.empty()) {
    *this = run;
    return;
  }
  if (run.conditions != conditions) {
    throw std::invalid_argument("eval report: condition lists differ");
  }
  Eigen::MatrixXd merged(accuracy.rows() + run.accuracy.rows(), accuracy.cols());
  merged << accuracy, run.accuracy;
  accuracy = std::move(merged);
  for (size_t c = 0; c < confusion.size(); ++c) confusion[c] += run.confusion[c];
  ties += run.ties;
}

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void EvalReport::WriteCsv(std::ostream& os) const {
  os << "condition,run,accuracy\n";
  for (size_t c = 0; c < conditions.size(); ++c) {
    for (int r = 0; r < runs(); ++r) {
      os << conditions[c] << ',' << r << ',' << Fixed(accuracy(r, c), 4) << '\n';
    }
  }
}

void EvalReport::WriteConfusionCsv(std::ostream& os, int condition,
                                   const std::vector<std::string>& labels) const {
  const Eigen::MatrixXi& m = confusion.at(condition);
  os << "true\\predicted";
  for (const auto& l : labels) os << ',' << l;
  os << ",reject\n";
  for (int i = 0; i < m.rows(); ++i) {
    os << labels.at(i);
    for (int j = 0; j < m.cols(); ++j) os << ',' << m(i, j);
    os << '\n';
  }
}

std::vector<int> LabelIndices(const std::vector<LabeledClip>& clips,
                              const std::vector<std::string>& labels) {
  std::map<std::string, int> index;
  for (int c = 0; c < static_cast<int>(labels.size()); ++c) index[labels[c]] = c;
  std::vector<int> out;
  out.reserve(clips.size());
  for (const auto& clip : clips) {
    auto it = index.find(clip.label);
    if (it == index.end()) throw DataError("unknown class label '" + clip.label + "'");
    out.push_back(it->second);
  }
  return out;
}

namespace {

// Stable, platform-independent tag for per-condition sub-seeds.
uint64_t NameTag(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

SpikePattern EncodeUnderCondition(const Waveform& clip, const Waveform& noise,
                                  const Condition& condition,
                                  const EncodingConfig& cfg, uint64_t seed) {
  if (condition.clean()) return Encode(clip, cfg);
  return Encode(MixAtSnr(clip, noise, condition.snr_db, seed), cfg);
}

namespace {

TrainingSet SoundTrainingSet(const std::vector<LabeledClip>& train,
                             const std::vector<std::string>& labels,
                             const Waveform& noise, const SoundTaskConfig& cfg) {
  const std::vector<int> y = LabelIndices(train, labels);
  TrainingSet set;
  set.n_afferents = cfg.encoding.window_samples / 2 + 1;
  set.labels = y;
  if (!cfg.multi_condition) {
    std::vector<SpikePattern> patterns(train.size());
    ParallelFor(train.size(), cfg.threads, [&](size_t i) {
      patterns[i] = Encode(train[i].waveform, cfg.encoding);
    });
    set = FixedTrainingSet(std::move(patterns), y);
  } else {
    if (cfg.train_conditions.empty()) {
      throw std::invalid_argument("multi-condition training needs conditions");
    }
    auto clips = std::make_shared<std::vector<LabeledClip>>(train);
    auto conds = cfg.train_conditions;
    const EncodingConfig enc = cfg.encoding;
    set.draw = [clips, conds, enc, &noise](size_t item, Rng& rng) {
      const size_t pick =
          std::min(conds.size() - 1, static_cast<size_t>(Uniform01(rng) * conds.size()));
      return EncodeUnderCondition((*clips)[item].waveform, noise, conds[pick], enc,
                                  rng());
    };
  }
  return set;
}

}  // namespace

Model TrainSoundModel(const std::vector<LabeledClip>& train,
                      const std::vector<std::string>& labels,
                      const Waveform& noise, const SoundTaskConfig& cfg,
                      uint64_t seed) {
  LearningConfig learning = cfg.learning;
  learning.seed = SubSeed(seed, {0x6c726e});
  return Train(SoundTrainingSet(train, labels, noise, cfg), labels, learning,
               cfg.params, cfg.threads);
}

Eigen::VectorXd TrainSoundNeuron(const std::vector<LabeledClip>& train,
                                 const std::vector<std::string>& labels,
                                 const Waveform& noise, const SoundTaskConfig& cfg,
                                 int target, uint64_t seed) {
  LearningConfig learning = cfg.learning;
  learning.seed = SubSeed(seed, {0x6c726e});
  return TrainClassNeuron(SoundTrainingSet(train, labels, noise, cfg), target,
                          learning, cfg.params);
}

EvalReport Evaluate(const Model& model, const std::vector<LabeledClip>& clips,
                    const std::vector<Condition>& conditions,
                    const Waveform& noise, const SoundTaskConfig& cfg,
                    uint64_t seed, double presence) {
  if (!(presence > 0.0 && presence <= 1.0)) {
    throw std::invalid_argument("presence ratio must be in (0, 1]");
  }
  const std::vector<int> y = LabelIndices(clips, model.labels);
  EvalReport report;
  report.accuracy.resize(1, conditions.size());
  for (size_t c = 0; c < conditions.size(); ++c) {
    const Condition& cond = conditions[c];
    std::vector<SpikePattern> patterns(clips.size());
    ParallelFor(clips.size(), cfg.threads, [&](size_t i) {
      SpikePattern p = EncodeUnderCondition(clips[i].waveform, noise, cond,
                                            cfg.encoding,
                                            SubSeed(seed, {NameTag(cond.name), i}));
      if (presence < 1.0) p = Truncate(p, presence * clips[i].waveform.Duration());
      patterns[i] = std::move(p);
    });
    const PatternEval e = EvaluatePatterns(model, patterns, y, cfg.readout, cfg.threads);
    report.conditions.push_back(cond.name);
    report.accuracy(0, c) = e.accuracy;
    report.confusion.push_back(e.confusion);
    report.ties += e.ties;
  }
  return report;
}

namespace {

std::vector<std::vector<size_t>> IndicesPerClass(
    const std::vector<LabeledClip>& clips, const std::vector<std::string>& labels) {
  const std::vector<int> y = LabelIndices(clips, labels);
  std::vector<std::vector<size_t>> per(labels.size());
  for (size_t i = 0; i < y.size(); ++i) per[y[i]].push_back(i);
  return per;
}

void ShuffleInPlace(std::vector<size_t>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = std::min(i - 1, static_cast<size_t>(Uniform01(rng) * i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

Split SplitPerClass(const std::vector<LabeledClip>& clips,
                    const std::vector<std::string>& labels, double train_fraction,
                    uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split: fraction must be in (0, 1)");
  }
  auto per = IndicesPerClass(clips, labels);
  std::vector<bool> in_train(clips.size(), false);
  for (size_t c = 0; c < per.size(); ++c) {
    if (per[c].size() < 2) {
      throw std::invalid_argument("split: class '" + labels[c] +
                                  "' needs at least two clips");
    }
    Rng rng = MakeRng(seed, {0x73706c74, c});
    ShuffleInPlace(per[c], rng);
    const size_t n_train = std::clamp<size_t>(
        static_cast<size_t>(std::llround(train_fraction * per[c].size())), 1,
        per[c].size() - 1);
    for (size_t k = 0; k < n_train; ++k) in_train[per[c][k]] = true;
  }
  Split s;
  for (size_t i = 0; i < clips.size(); ++i) {
    (in_train[i] ? s.train : s.test).push_back(clips[i]);
  }
  return s;
}

std::vector<LabeledClip> SubsamplePerClass(const std::vector<LabeledClip>& clips,
                                           const std::vector<std::string>& labels,
                                           double ratio, uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("training ratio must be in (0, 1]");
  }
  auto per = IndicesPerClass(clips, labels);
  std::vector<bool> keep(clips.size(), false);
  for (size_t c = 0; c < per.size(); ++c) {
    if (per[c].empty()) {
      throw std::invalid_argument("subsample: class '" + labels[c] + "' is empty");
    }
    Rng rng = MakeRng(seed, {0x73756273, c});
    ShuffleInPlace(per[c], rng);
    const size_t n = std::max<size_t>(
        1, static_cast<size_t>(std::llround(ratio * per[c].size())));
    for (size_t k = 0; k < n; ++k) keep[per[c][k]] = true;
  }
  std::vector<LabeledClip> out;
  for (size_t i = 0; i < clips.size(); ++i) {
    if (keep[i]) out.push_back(clips[i]);
  }
  return out;
}

namespace {

struct RunSeeds {
  uint64_t split, train, test, subsample;
};

RunSeeds SeedsForRun(uint64_t seed, int run) {
  const uint64_t r = static_cast<uint64_t>(run);
  return {SubSeed(seed, {r, 1}), SubSeed(seed, {r, 2}), SubSeed(seed, {r, 3}),
          SubSeed(seed, {r, 4})};
}

}  // namespace

EvalReport RunMismatched(const SoundExperiment& exp,
                         const std::vector<Condition>& conditions) {
  EvalReport total;
  for (int run = 0; run < exp.runs; ++run) {
    const RunSeeds s = SeedsForRun(exp.seed, run);
    const Split split = SplitPerClass(exp.corpus, exp.labels, 0.5, s.split);
    const Model model = TrainSoundModel(split.train, exp.labels, exp.noise, exp.task, s.train);
    total.Append(Evaluate(model, split.test, conditions, exp.noise, exp.task, s.test));
  }
  return total;
}

std::vector<double> EarlyDecisionEval(const SoundExperiment& exp,
                                      const std::vector<double>& ratios,
                                      const Condition& condition) {
  std::vector<double> acc(ratios.size(), 0.0);
  for (int run = 0; run < exp.runs; ++run) {
    const RunSeeds s = SeedsForRun(exp.seed, run);
    const Split split = SplitPerClass(exp.corpus, exp.labels, 0.5, s.split);
    const Model model = TrainSoundModel(split.train, exp.labels, exp.noise, exp.task, s.train);
    for (size_t k = 0; k < ratios.size(); ++k) {
      const EvalReport r =
          Evaluate(model, split.test, {condition}, exp.noise, exp.task, s.test, ratios[k]);
      acc[k] += r.Avg() / exp.runs;
    }
  }
  return acc;
}

std::vector<double> NdSweep(const SoundExperiment& exp, const std::vector<int>& n_d,
                            const std::vector<Condition>& conditions) {
  std::vector<double> out;
  for (int nd : n_d) {
    if (nd < 1) throw std::invalid_argument("n_d must be >= 1");
    SoundExperiment e = exp;
    e.task.learning.target_range = nd == 1 ? SpikeRange{1, 1} : SpikeRange{nd, kUnbounded};
    e.task.readout.critical = nd;
    out.push_back(RunMismatched(e, conditions).Avg());
  }
  return out;
}

std::vector<double> TrainRatioEval(const SoundExperiment& exp,
                                   const std::vector<double>& ratios,
                                   const std::vector<Condition>& conditions) {
  std::vector<double> out;
  for (double ratio : ratios) {
    EvalReport total;
    for (int run = 0; run < exp.runs; ++run) {
      const RunSeeds s = SeedsForRun(exp.seed, run);
      const Split split = SplitPerClass(exp.corpus, exp.labels, 0.5, s.split);
      const auto train = SubsamplePerClass(split.train, exp.labels, ratio, s.subsample);
      const Model model = TrainSoundModel(train, exp.labels, exp.noise, exp.task, s.train);
      total.Append(Evaluate(model, split.test, conditions, exp.noise, exp.task, s.test));
    }
    out.push_back(total.Avg());
  }
  return out;
}

std::vector<Detection> DetectBursts(const std::vector<double>& spikes, int label,
                                    const BurstConfig& burst, double end_s) {
  if (burst.k < 1) throw std::invalid_argument("burst: k must be >= 1");
  if (!(burst.window_s > 0.0)) throw std::invalid_argument("burst: window must be > 0");
  std::vector<double> sorted = spikes;
  std::sort(sorted.begin(), sorted.end());
  const double close_below = 0.5 * burst.k;

  std::vector<Detection> raw;
  std::deque<double> window;  // spikes in (t - w, t]
  bool open = false;
  Detection current;
  const auto expire_until = [&](double t) {
    // Departures at s + w strictly before or at t, in time order.
    while (!window.empty() && window.front() + burst.window_s <= t) {
      const double leave = window.front() + burst.window_s;
      window.pop_front();
      if (open && window.size() < close_below) {
        current.offset = leave;
        raw.push_back(current);
        open = false;
      }
    }
  };
  for (double s : sorted) {
    expire_until(s);
    window.push_back(s);
    if (!open && static_cast<int>(window.size()) >= burst.k) {
      open = true;
      current = Detection{window.front(), 0.0, label, 0};
    }
    if (open) current.spike_count = std::max<int>(current.spike_count, window.size());
  }
  if (open && std::isfinite(burst.window_s)) {
    expire_until(std::numeric_limits<double>::infinity());
  }
  if (open) {
    current.offset = std::max(end_s, sorted.back());
    if (!(current.offset > current.onset)) current.offset = current.onset + 1e-3;
    raw.push_back(current);
  }
  std::vector<Detection> merged;
  for (const Detection& d : raw) {
    if (!merged.empty() && d.onset <= merged.back().offset) {
      merged.back().offset = std::max(merged.back().offset, d.offset);
      merged.back().spike_count = std::max(merged.back().spike_count, d.spike_count);
    } else {
      merged.push_back(d);
    }
  }
  return merged;
}

std::vector<Detection> StreamDetect(const Model& model, const Waveform& stream,
                                    const EncodingConfig& cfg, double block_s,
                                    const BurstConfig& burst, int target) {
  if (target < 0 || target >= model.n_classes()) {
    throw std::invalid_argument("stream: target class out of range");
  }
  const SpikePattern pattern = EncodeStream(stream, cfg, block_s);
  const SimResult sim = Simulate(pattern, model.weights[target], model.params);
  return DetectBursts(sim.output_spikes, target, burst, stream.Duration());
}

DetectionScore ScoreDetections(const std::vector<Detection>& detections,
                               const std::vector<StreamEvent>& events,
                               const std::string& target_label,
                               double duration_s) {
  DetectionScore s;
  s.minutes = duration_s / 60.0;
  const auto overlaps = [](const Detection& d, const StreamEvent& e) {
    return d.onset < e.offset && e.onset < d.offset;
  };
  for (const auto& e : events) {
    if (e.label != target_label) continue;
    ++s.events;
    for (const auto& d : detections) {
      if (overlaps(d, e)) {
        ++s.hits;
        break;
      }
    }
  }
  for (const auto& d : detections) {
    bool any = false;
    for (const auto& e : events) {
      if (e.label == target_label && overlaps(d, e)) any = true;
    }
    s.false_alarms += !any;
  }
  return s;
}

std::vector<StreamRun> RunStreams(const StreamExperiment& exp) {
  const int C = static_cast<int>(exp.labels.size());
  if (C < 2) throw std::invalid_argument("stream: need at least two classes");
  if (exp.target >= C) throw std::invalid_argument("stream: target class out of range");
  std::vector<StreamRun> out(exp.runs);
  ParallelFor(exp.runs, exp.task.threads, [&](size_t r) {
    StreamRun& run = out[r];
    run.run = static_cast<int>(r);
    run.target = exp.target >= 0 ? exp.target
                                 : static_cast<int>((exp.first_target + r) % C);
    const uint64_t base = SubSeed(exp.seed, {0x7374726d, r});
    const Split split = SplitPerClass(exp.corpus, exp.labels, 0.5, SubSeed(base, {1}));
    SoundTaskConfig task = exp.task;
    task.threads = 1;
    Model model;
    model.labels = exp.labels;
    model.params = task.params;
    model.rule = task.learning.rule;
    model.weights.assign(C, Eigen::VectorXd());
    model.weights[run.target] = TrainSoundNeuron(split.train, exp.labels, exp.noise, task,
                                                 run.target, SubSeed(base, {2}));

    std::vector<LabeledClip> targets, others;
    for (const auto& c : split.test) {
      (c.label == exp.labels[run.target] ? targets : others).push_back(c);
    }
    Rng rng = MakeRng(base, {3});
    const auto pick = [&rng](std::vector<LabeledClip>& pool, int n) {
      std::vector<size_t> idx(pool.size());
      for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      ShuffleInPlace(idx, rng);
      std::vector<LabeledClip> chosen;
      for (int i = 0; i < n && i < static_cast<int>(idx.size()); ++i) {
        chosen.push_back(pool[idx[i]]);
      }
      return chosen;
    };
    const auto tg = pick(targets, exp.n_targets);
    const auto ds = pick(others, exp.n_distractors);
    const int rate = exp.corpus.front().waveform.sample_rate;
    const Waveform background =
        exp.stream_noise.samples.empty()
            ? BabbleNoise(exp.duration_s, SubSeed(base, {4}), rate, exp.talkers)
            : exp.stream_noise;
    const Stream stream =
        BuildStream(tg, ds, background, exp.snr_db, exp.duration_s, SubSeed(base, {5}));
    const double block =
        exp.block_s > 0.0 ? exp.block_s : exp.corpus.front().waveform.Duration();
    run.events = stream.events;
    run.detections =
        StreamDetect(model, stream.audio, task.encoding, block, exp.burst, run.target);
    run.score = ScoreDetections(run.detections, stream.events, exp.labels[run.target],
                                exp.duration_s);
  });
  return out;
}

}  // namespace spikesound
