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

// spikesound: corpus generation, encoding, training, evaluation, sweeps,
// critical-threshold audits, stream detection and the synthetic
// spike-pattern experiments.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spikesound/audio.h"
#include "spikesound/encoding.h"
#include "spikesound/experiments.h"
#include "spikesound/learning.h"
#include "spikesound/neuron.h"
#include "spikesound/readout.h"
#include "spikesound/spike_pattern.h"
#include "spikesound/sts.h"

namespace fs = std::filesystem;
using namespace spikesound;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string Trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> SplitList(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> ParseDoubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : SplitList(text)) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("bad number '" + item + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(what + " must not be empty");
  return out;
}

std::vector<int> ParseInts(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (double v : ParseDoubles(text, what)) {
    if (v != std::floor(v)) throw UsageError("expected integers in " + what);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// --- options shared by every subcommand ----------------------------------

struct Common {
  uint64_t seed = 1;
  std::string config;
  std::string out = "out";
  int threads = 1;
};

void AddCommon(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Top-level seed");
  sub->add_option("--config", c.config, "key = value file; flags override it");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
}

// Applies `key = value` lines to options not given on the command line.
void ApplyConfig(CLI::App* sub, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt || key == "config" || key == "help") {
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown config key '" +
                       key + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

// Every option with its effective value, in definition order.
void EchoConfig(CLI::App* sub, const fs::path& dir) {
  std::ofstream os(dir / "config.txt");
  os << "# " << sub->get_name() << "\n";
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
    } else {
      value = opt->get_default_str();
    }
    if (opt->get_type_size() == 0 && value.empty()) value = "false";
    os << name << " = " << value << "\n";
  }
}

fs::path PrepareOut(const Common& c) {
  fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + c.out + ": " + ec.message());
  return dir;
}

std::ofstream OpenCsv(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  return os;
}

// --- sound corpus and task ----------------------------------------------

struct CorpusOpts {
  std::string dir;  // manifest.csv with path,label rows; synthetic if empty
  int classes = 10;
  int files = 80;
  double duration = 0.5;
  uint64_t corpus_seed = 42;
  int rate = 16000;
  std::string noise;  // WAV; synthetic babble if empty
  double noise_seconds = 30.0;
  uint64_t noise_seed = 7;
  int talkers = 32;
};

void AddCorpusOptions(CLI::App* sub, CorpusOpts& o) {
  sub->add_option("--corpus", o.dir,
                  "Directory with manifest.csv (path,label); empty = synthetic corpus");
  sub->add_option("--classes", o.classes, "Synthetic classes");
  sub->add_option("--files", o.files,
                  "Files per class (synthetic), or the first N per class of a manifest (0 = all)");
  sub->add_option("--clip-seconds", o.duration, "Synthetic clip duration (s)");
  sub->add_option("--corpus-seed", o.corpus_seed, "Synthetic corpus seed");
  sub->add_option("--rate", o.rate, "Sample rate for synthetic audio and raw PCM input");
  sub->add_option("--noise", o.noise, "Noise WAV; empty = synthetic babble");
  sub->add_option("--noise-seconds", o.noise_seconds, "Synthetic babble duration (s)");
  sub->add_option("--noise-seed", o.noise_seed, "Synthetic babble seed");
  sub->add_option("--talkers", o.talkers, "Synthetic babble talkers");
}

Waveform LoadAudioFile(const std::string& path, int rate) {
  const std::string ext = fs::path(path).extension().string();
  const AudioFormat fmt =
      (ext == ".raw" || ext == ".pcm") ? AudioFormat::kRawPcm16 : AudioFormat::kWavPcm16;
  try {
    return LoadAudio(path, fmt, rate);
  } catch (const DataError& e) {
    const std::string msg = e.what();
    if (msg.find(path) != std::string::npos) throw;
    throw DataError(path + ": " + msg);
  }
}

struct Corpus {
  std::vector<LabeledClip> clips;
  std::vector<std::string> labels;
};

Corpus LoadCorpus(const CorpusOpts& o) {
  Corpus c;
  if (o.dir.empty()) {
    c.clips = SynthCorpus(o.classes, o.files, o.duration, o.corpus_seed, o.rate);
    const auto& names = SynthClassNames();
    c.labels.assign(names.begin(), names.begin() + o.classes);
    return c;
  }
  const fs::path manifest = fs::path(o.dir) / "manifest.csv";
  std::ifstream is(manifest);
  if (!is) throw DataError("cannot open " + manifest.string());
  std::string line;
  std::getline(is, line);
  if (Trim(line) != "path,label") {
    throw DataError(manifest.string() + ": expected header 'path,label'");
  }
  std::map<std::string, int> per_label;
  while (std::getline(is, line)) {
    if (Trim(line).empty()) continue;
    const auto cols = SplitList(line);
    if (cols.size() != 2) throw DataError(manifest.string() + ": bad row '" + line + "'");
    const std::string& label = cols[1];
    if (!per_label.count(label)) c.labels.push_back(label);
    if (o.files > 0 && per_label[label] >= o.files) continue;
    ++per_label[label];
    LabeledClip clip;
    clip.waveform = LoadAudioFile((fs::path(o.dir) / cols[0]).string(), o.rate);
    clip.label = label;
    clip.source_id = cols[0];
    c.clips.push_back(std::move(clip));
  }
  if (c.clips.empty()) throw DataError(manifest.string() + ": no clips");
  return c;
}

Waveform LoadNoise(const CorpusOpts& o) {
  if (!o.noise.empty()) return LoadAudioFile(o.noise, o.rate);
  return BabbleNoise(o.noise_seconds, o.noise_seed, o.rate, o.talkers);
}

void AddEncodingOptions(CLI::App* sub, EncodingConfig& e) {
  sub->add_option("--window", e.window_samples, "STFT window (samples)");
  sub->add_option("--hop", e.hop, "STFT hop (s)");
  sub->add_option("--epsilon", e.epsilon, "Log floor");
  sub->add_option("--d-t", e.d_t, "Key-point neighbourhood along time (frames)");
  sub->add_option("--d-f", e.d_f, "Key-point neighbourhood along frequency (bins)");
  sub->add_option("--beta-a", e.beta_a, "Absolute-value mask");
  sub->add_option("--beta-r", e.beta_r, "Relative-background mask");
}

struct TaskOpts {
  EncodingConfig encoding;
  double tau_m = 40.0;
  double tau_s = 10.0;
  double threshold = 1.0;
  std::string rule = "tdp";
  double lambda = 1e-4;
  double momentum = 0.9;
  int target_lo = 20;
  int target_hi = 0;  // 0 = unbounded
  int psd_spikes = 4;
  double zeta = 10.0;
  int max_epochs = 100;
  double init_mean = 0.0;
  double init_std = 0.01;
  std::string scheme = "wta";
  int critical = -1;
  bool multi_condition = false;
  std::string train_conditions = "clean,20,10";
};

void AddTaskOptions(CLI::App* sub, TaskOpts& t) {
  AddEncodingOptions(sub, t.encoding);
  sub->add_option("--tau-m", t.tau_m, "Membrane time constant (ms)");
  sub->add_option("--tau-s", t.tau_s, "Synaptic time constant (ms)");
  sub->add_option("--threshold", t.threshold, "Firing threshold");
  sub->add_option("--rule", t.rule, "tdp, tempotron or psd");
  sub->add_option("--lambda", t.lambda, "Learning rate");
  sub->add_option("--momentum", t.momentum, "Momentum");
  sub->add_option("--target-lo", t.target_lo, "TDP: least output spikes for the target class");
  sub->add_option("--target-hi", t.target_hi, "TDP: most output spikes for the target (0 = no limit)");
  sub->add_option("--psd-spikes", t.psd_spikes, "PSD: evenly spaced desired spikes");
  sub->add_option("--zeta", t.zeta, "PSD: coincidence margin (ms)");
  sub->add_option("--max-epochs", t.max_epochs, "Training epoch limit");
  sub->add_option("--init-mean", t.init_mean, "Initial weight mean");
  sub->add_option("--init-std", t.init_std, "Initial weight standard deviation");
  sub->add_option("--scheme", t.scheme, "Readout: wta or abs");
  sub->add_option("--critical", t.critical, "abs critical spike count (-1 = rule default)");
  sub->add_flag("--multi-condition", t.multi_condition,
                "Train on a random condition per presentation");
  sub->add_option("--train-conditions", t.train_conditions,
                  "Multi-condition training conditions (clean or dB)");
}

SoundTaskConfig MakeTask(const TaskOpts& t, double clip_duration, int threads) {
  SoundTaskConfig cfg;
  cfg.encoding = t.encoding;
  cfg.encoding.Validate();
  cfg.params = NeuronParams::Make(t.tau_m, t.tau_s, t.threshold);
  LearningConfig& l = cfg.learning;
  l.rule = ParseRule(t.rule);
  l.lambda = t.lambda;
  l.momentum = t.momentum;
  l.zeta_ms = t.zeta;
  l.target_range = {t.target_lo, t.target_hi > 0 ? t.target_hi : kUnbounded};
  l.null_range = {0, 0};
  l.max_epochs = t.max_epochs;
  l.init_mean = t.init_mean;
  l.init_std = t.init_std;
  if (l.rule == Rule::kPsd) l.desired_times = EvenlySpacedTimes(t.psd_spikes, clip_duration);
  l.Validate();
  cfg.readout.scheme = ParseScheme(t.scheme);
  cfg.readout.critical = t.critical;
  cfg.multi_condition = t.multi_condition;
  cfg.train_conditions = ParseConditions(t.train_conditions);
  cfg.threads = threads;
  return cfg;
}

double ClipDuration(const Corpus& c) { return c.clips.front().waveform.Duration(); }

SoundExperiment MakeExperiment(const Corpus& corpus, const Waveform& noise,
                               const TaskOpts& t, const Common& c, int runs) {
  SoundExperiment e;
  e.corpus = corpus.clips;
  e.labels = corpus.labels;
  e.noise = noise;
  e.task = MakeTask(t, ClipDuration(corpus), c.threads);
  e.runs = runs;
  e.seed = c.seed;
  return e;
}

void WriteReport(const fs::path& dir, const EvalReport& report,
                 const std::vector<std::string>& labels) {
  {
    auto os = OpenCsv(dir / "accuracy.csv");
    report.WriteCsv(os);
  }
  {
    auto os = OpenCsv(dir / "summary.csv");
    os << "condition,mean_accuracy\n";
    char buf[64];
    for (int c = 0; c < static_cast<int>(report.conditions.size()); ++c) {
      std::snprintf(buf, sizeof(buf), "%.4f", report.Mean(c));
      os << report.conditions[c] << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof(buf), "%.4f", report.Avg());
    os << "avg," << buf << '\n';
  }
  for (int c = 0; c < static_cast<int>(report.conditions.size()); ++c) {
    auto os = OpenCsv(dir / ("confusion_" + report.conditions[c] + ".csv"));
    report.WriteConfusionCsv(os, c, labels);
  }
}

// Train/test split used by `train` and `eval` for one seed.
Split TrainTestSplit(const Corpus& corpus, double fraction, uint64_t seed) {
  return SplitPerClass(corpus.clips, corpus.labels, fraction, SubSeed(seed, {0x73706c}));
}

// --- subcommands --------------------------------------------------------

struct Command {
  CLI::App* app = nullptr;
  Common common;
  std::function<void(Command&)> run;
};

void GenCorpus(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  auto o = std::make_shared<CorpusOpts>();
  CLI::App* sub = root.add_subcommand("gen-corpus", "Write the synthetic corpus and babble noise as WAV");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--classes", o->classes, "Classes (<= 10)");
  sub->add_option("--files", o->files, "Files per class");
  sub->add_option("--clip-seconds", o->duration, "Clip duration (s)");
  sub->add_option("--rate", o->rate, "Sample rate");
  sub->add_option("--noise-seconds", o->noise_seconds, "Babble duration (s); 0 = none");
  sub->add_option("--talkers", o->talkers, "Babble talkers");
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    const auto clips = SynthCorpus(o->classes, o->files, o->duration, c.common.seed, o->rate);
    auto manifest = OpenCsv(dir / "manifest.csv");
    manifest << "path,label\n";
    for (const auto& clip : clips) {
      fs::create_directories(dir / clip.label);
      const std::string rel = clip.label + "/" + clip.source_id + ".wav";
      SaveWav((dir / rel).string(), clip.waveform);
      manifest << rel << ',' << clip.label << '\n';
    }
    if (o->noise_seconds > 0.0) {
      SaveWav((dir / "babble.wav").string(),
              BabbleNoise(o->noise_seconds, SubSeed(c.common.seed, {0x626162}), o->rate,
                          o->talkers));
    }
  };
  cmds.push_back(std::move(cmd));
}

void Encode(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts {
    CorpusOpts corpus;
    EncodingConfig encoding;
    std::string input;
    bool write_patterns = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = root.add_subcommand(
      "encode", "Encode one audio file (--input) or a corpus into key-point spike patterns");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--input", o->input, "WAV or raw PCM16 (.raw/.pcm) file");
  AddCorpusOptions(sub, o->corpus);
  AddEncodingOptions(sub, o->encoding);
  sub->add_flag("--write-patterns", o->write_patterns, "Also write SPKPAT files for a corpus");
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    o->encoding.Validate();
    const fs::path dir = PrepareOut(c.common);
    if (!o->input.empty()) {
      const Waveform wave = LoadAudioFile(o->input, o->corpus.rate);
      Spectrogram s;
      const KeyPointSet kp = EncodeKeypoints(wave, o->encoding, &s);
      const std::string stem = fs::path(o->input).stem().string();
      SaveSpkPat((dir / (stem + ".spkpat")).string(), ToSpikePattern(kp, s));
      auto os = OpenCsv(dir / (stem + "_keypoints.csv"));
      os << "t_index,f_index,time_s,value\n";
      for (const auto& p : kp) {
        os << p.t << ',' << p.f << ',' << Num(s.frame_times[p.t]) << ',' << Num(p.value) << '\n';
      }
      auto summary = OpenCsv(dir / "density.csv");
      summary << "source_id,label,frames,bins,keypoints,density\n";
      summary << stem << ",," << s.n_frames() << ',' << s.n_bins() << ',' << kp.size() << ','
              << Num(static_cast<double>(kp.size()) / (s.n_frames() * s.n_bins())) << '\n';
      return;
    }
    const Corpus corpus = LoadCorpus(o->corpus);
    auto summary = OpenCsv(dir / "density.csv");
    summary << "source_id,label,frames,bins,keypoints,density\n";
    if (o->write_patterns) fs::create_directories(dir / "patterns");
    for (const auto& clip : corpus.clips) {
      Spectrogram s;
      const KeyPointSet kp = EncodeKeypoints(clip.waveform, o->encoding, &s);
      summary << clip.source_id << ',' << clip.label << ',' << s.n_frames() << ','
              << s.n_bins() << ',' << kp.size() << ','
              << Num(static_cast<double>(kp.size()) / (s.n_frames() * s.n_bins())) << '\n';
      if (o->write_patterns) {
        const std::string name = fs::path(clip.source_id).stem().string();
        SaveSpkPat((dir / "patterns" / (name + ".spkpat")).string(), ToSpikePattern(kp, s));
      }
    }
  };
  cmds.push_back(std::move(cmd));
}

struct SoundOpts {
  CorpusOpts corpus;
  TaskOpts task;
  double train_fraction = 0.5;
};

void Train(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  auto o = std::make_shared<SoundOpts>();
  CLI::App* sub = root.add_subcommand("train", "Train one neuron per class on the training split");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  AddCorpusOptions(sub, o->corpus);
  AddTaskOptions(sub, o->task);
  sub->add_option("--train-fraction", o->train_fraction, "Per-class training fraction");
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    const Corpus corpus = LoadCorpus(o->corpus);
    const Waveform noise = LoadNoise(o->corpus);
    const SoundTaskConfig task = MakeTask(o->task, ClipDuration(corpus), c.common.threads);
    const Split split = TrainTestSplit(corpus, o->train_fraction, c.common.seed);
    const Model model = TrainSoundModel(split.train, corpus.labels, noise, task,
                                        SubSeed(c.common.seed, {0x747261}));
    SaveModel((dir / "model.spkmodel").string(), model);
    auto os = OpenCsv(dir / "split.csv");
    os << "source_id,label,set\n";
    for (const auto& clip : split.train) os << clip.source_id << ',' << clip.label << ",train\n";
    for (const auto& clip : split.test) os << clip.source_id << ',' << clip.label << ",test\n";
  };
  cmds.push_back(std::move(cmd));
}

void Eval(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts : SoundOpts {
    std::string model;
    std::string conditions = "clean,20,10,0,-5";
    int runs = 10;
    double presence = 1.0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = root.add_subcommand(
      "eval",
      "Evaluate --model on the test split of its seed, or run --runs train/test cycles");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--model", o->model, "SPKMODEL file from `train` (same --seed and corpus)");
  sub->add_option("--conditions", o->conditions, "Test conditions (clean or dB)");
  sub->add_option("--runs", o->runs, "Independent runs when no model is given");
  sub->add_option("--presence", o->presence, "Fraction of each test pattern kept");
  AddCorpusOptions(sub, o->corpus);
  AddTaskOptions(sub, o->task);
  sub->add_option("--train-fraction", o->train_fraction, "Per-class training fraction");
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    const auto conditions = ParseConditions(o->conditions);
    const Corpus corpus = LoadCorpus(o->corpus);
    const Waveform noise = LoadNoise(o->corpus);
    if (!o->model.empty()) {
      const Model model = LoadModel(o->model);
      if (model.labels != corpus.labels) {
        throw DataError(o->model + ": class labels do not match the corpus");
      }
      SoundTaskConfig task = MakeTask(o->task, ClipDuration(corpus), c.common.threads);
      task.params = model.params;
      const Split split = TrainTestSplit(corpus, o->train_fraction, c.common.seed);
      const EvalReport report = Evaluate(model, split.test, conditions, noise, task,
                                         SubSeed(c.common.seed, {0x746573}), o->presence);
      WriteReport(dir, report, corpus.labels);
      return;
    }
    if (o->presence != 1.0) throw UsageError("--presence needs --model (see sweep-early)");
    if (o->runs < 1) throw UsageError("--runs must be >= 1");
    const SoundExperiment exp = MakeExperiment(corpus, noise, o->task, c.common, o->runs);
    WriteReport(dir, RunMismatched(exp, conditions), corpus.labels);
  };
  cmds.push_back(std::move(cmd));
}

void SweepNd(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts : SoundOpts {
    std::string nd = "1,5,10,15,20,25,30";
    std::string conditions = "clean,20,10,0,-5";
    int runs = 10;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = root.add_subcommand("sweep-nd", "Accuracy versus target spike number");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--nd", o->nd, "Target spike numbers");
  sub->add_option("--conditions", o->conditions, "Test conditions");
  sub->add_option("--runs", o->runs, "Runs per point");
  AddCorpusOptions(sub, o->corpus);
  AddTaskOptions(sub, o->task);
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    const auto nd = ParseInts(o->nd, "--nd");
    const auto conditions = ParseConditions(o->conditions);
    const Corpus corpus = LoadCorpus(o->corpus);
    const SoundExperiment exp =
        MakeExperiment(corpus, LoadNoise(o->corpus), o->task, c.common, o->runs);
    const auto acc = NdSweep(exp, nd, conditions);
    auto os = OpenCsv(dir / "nd.csv");
    os << "n_d,accuracy\n";
    for (size_t i = 0; i < nd.size(); ++i) os << nd[i] << ',' << Num(acc[i]) << '\n';
  };
  cmds.push_back(std::move(cmd));
}

void SweepEarly(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts : SoundOpts {
    std::string ratios = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
    std::string condition = "clean";
    int runs = 10;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = root.add_subcommand(
      "sweep-early", "Accuracy when only the first part of each test pattern is present");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--ratios", o->ratios, "Presence ratios in (0, 1]");
  sub->add_option("--condition", o->condition, "Test condition");
  sub->add_option("--runs", o->runs, "Runs");
  AddCorpusOptions(sub, o->corpus);
  AddTaskOptions(sub, o->task);
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    const auto ratios = ParseDoubles(o->ratios, "--ratios");
    const Condition condition = ParseCondition(o->condition);
    const Corpus corpus = LoadCorpus(o->corpus);
    const SoundExperiment exp =
        MakeExperiment(corpus, LoadNoise(o->corpus), o->task, c.common, o->runs);
    const auto acc = EarlyDecisionEval(exp, ratios, condition);
    auto os = OpenCsv(dir / "early.csv");
    os << "ratio,accuracy\n";
    for (size_t i = 0; i < ratios.size(); ++i) os << Num(ratios[i]) << ',' << Num(acc[i]) << '\n';
  };
  cmds.push_back(std::move(cmd));
}

void SweepTrainRatio(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts : SoundOpts {
    std::string ratios = "0.1,0.2,0.4,0.6,0.8,1.0";
    std::string conditions = "clean,20,10,0,-5";
    int runs = 10;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = root.add_subcommand(
      "sweep-trainratio", "Accuracy versus the fraction of the training split used");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--ratios", o->ratios, "Training ratios in (0, 1]");
  sub->add_option("--conditions", o->conditions, "Test conditions");
  sub->add_option("--runs", o->runs, "Runs per point");
  AddCorpusOptions(sub, o->corpus);
  AddTaskOptions(sub, o->task);
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    const auto ratios = ParseDoubles(o->ratios, "--ratios");
    const auto conditions = ParseConditions(o->conditions);
    const Corpus corpus = LoadCorpus(o->corpus);
    const SoundExperiment exp =
        MakeExperiment(corpus, LoadNoise(o->corpus), o->task, c.common, o->runs);
    const auto acc = TrainRatioEval(exp, ratios, conditions);
    auto os = OpenCsv(dir / "trainratio.csv");
    os << "ratio,accuracy\n";
    for (size_t i = 0; i < ratios.size(); ++i) os << Num(ratios[i]) << ',' << Num(acc[i]) << '\n';
  };
  cmds.push_back(std::move(cmd));
}

void StsCheckCmd(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts {
    StsCheckConfig cfg;
    double tau_m = 20.0;
    double tau_s = 5.0;
    double threshold = 1.0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = root.add_subcommand(
      "sts-check", "Audit critical thresholds and their gradients on random patterns");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--cases", o->cfg.cases, "Random cases");
  sub->add_option("--max-afferents", o->cfg.max_afferents, "Largest N (>= 10)");
  sub->add_option("--max-duration", o->cfg.max_duration_s, "Longest pattern (s, >= 0.1)");
  sub->add_option("--k-max", o->cfg.k_max, "Largest k bracketed");
  sub->add_option("--grad-k-max", o->cfg.grad_k_max, "Largest k whose gradient is checked");
  sub->add_option("--tau-m", o->tau_m, "Membrane time constant (ms)");
  sub->add_option("--tau-s", o->tau_s, "Synaptic time constant (ms)");
  sub->add_option("--threshold", o->threshold, "Nominal threshold");
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    StsCheckConfig cfg = o->cfg;
    cfg.params = NeuronParams::Make(o->tau_m, o->tau_s, o->threshold);
    cfg.seed = c.common.seed;
    cfg.threads = c.common.threads;
    auto os = OpenCsv(dir / "sts_check.csv");
    WriteStsCheckCsv(os, StsCheck(cfg));
  };
  cmds.push_back(std::move(cmd));
}

void StreamCmd(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts : SoundOpts {
    std::string input;
    std::string model;
    std::string target;
    int runs = 10;
    double snr = -5.0;
    double seconds = 60.0;
    int targets = 8;
    int distractors = 8;
    double block = 0.0;
    int burst_k = 3;
    double burst_w = 300.0;
    std::string stream_noise;
    int stream_talkers = 32;
  };
  auto o = std::make_shared<Opts>();
  o->task.multi_condition = true;
  o->task.train_conditions = "clean,20,10,0,-5";
  CLI::App* sub = root.add_subcommand(
      "stream",
      "Detect a target sound in a long recording (--input with --model), or run seeded "
      "stream experiments");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--input", o->input, "Recording to scan (needs --model and --target)");
  sub->add_option("--model", o->model, "SPKMODEL file");
  sub->add_option("--target", o->target, "Target label; empty = cycle through classes");
  sub->add_option("--runs", o->runs, "Streams (one target each)");
  sub->add_option("--snr", o->snr, "Stream SNR against the clip power (dB)");
  sub->add_option("--stream-seconds", o->seconds, "Stream duration (s)");
  sub->add_option("--targets", o->targets, "Target clips per stream");
  sub->add_option("--distractors", o->distractors, "Distractor clips per stream");
  sub->add_option("--block", o->block, "Encoding block (s); 0 = clip duration");
  sub->add_option("--burst-k", o->burst_k, "Spikes that open a detection");
  sub->add_option("--burst-w", o->burst_w, "Burst window (ms); inf allowed");
  sub->add_option("--stream-noise", o->stream_noise, "Stream background WAV; empty = babble");
  sub->add_option("--stream-talkers", o->stream_talkers, "Talkers of the stream babble");
  AddCorpusOptions(sub, o->corpus);
  AddTaskOptions(sub, o->task);
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    if (o->burst_k < 1) throw UsageError("--burst-k must be >= 1");
    if (!(o->burst_w > 0.0)) throw UsageError("--burst-w must be > 0");
    const BurstConfig burst{o->burst_k, o->burst_w * 1e-3};
    if (!o->input.empty()) {
      if (o->model.empty() || o->target.empty()) {
        throw UsageError("--input needs --model and --target");
      }
      const Model model = LoadModel(o->model);
      int target = -1;
      for (int i = 0; i < model.n_classes(); ++i) {
        if (model.labels[i] == o->target) target = i;
      }
      if (target < 0) throw UsageError("unknown target label '" + o->target + "'");
      const Waveform wave = LoadAudioFile(o->input, o->corpus.rate);
      if (!(o->block > 0.0)) throw UsageError("--input needs --block (training clip duration)");
      o->task.encoding.Validate();
      const auto det = StreamDetect(model, wave, o->task.encoding, o->block, burst, target);
      auto os = OpenCsv(dir / "detections.csv");
      os << "onset_s,offset_s,label,score\n";
      for (const auto& d : det) {
        os << Num(d.onset) << ',' << Num(d.offset) << ',' << model.labels[d.label] << ','
           << d.spike_count << '\n';
      }
      return;
    }
    const Corpus corpus = LoadCorpus(o->corpus);
    StreamExperiment e;
    e.corpus = corpus.clips;
    e.labels = corpus.labels;
    e.noise = LoadNoise(o->corpus);
    e.task = MakeTask(o->task, ClipDuration(corpus), c.common.threads);
    e.snr_db = o->snr;
    e.duration_s = o->seconds;
    e.n_targets = o->targets;
    e.n_distractors = o->distractors;
    e.block_s = o->block;
    e.burst = burst;
    if (!o->stream_noise.empty()) e.stream_noise = LoadAudioFile(o->stream_noise, o->corpus.rate);
    e.talkers = o->stream_talkers;
    e.runs = o->runs;
    e.seed = c.common.seed;
    if (!o->target.empty()) {
      for (size_t i = 0; i < e.labels.size(); ++i) {
        if (e.labels[i] == o->target) e.target = static_cast<int>(i);
      }
      if (e.target < 0) throw UsageError("unknown target label '" + o->target + "'");
    }
    const auto runs = RunStreams(e);
    auto det = OpenCsv(dir / "detections.csv");
    det << "run,onset_s,offset_s,label,score\n";
    auto ev = OpenCsv(dir / "events.csv");
    ev << "run,onset_s,offset_s,label\n";
    auto sc = OpenCsv(dir / "score.csv");
    sc << "run,target,events,hits,false_alarms,minutes\n";
    DetectionScore total;
    for (const auto& r : runs) {
      for (const auto& d : r.detections) {
        det << r.run << ',' << Num(d.onset) << ',' << Num(d.offset) << ','
            << e.labels[d.label] << ',' << d.spike_count << '\n';
      }
      for (const auto& x : r.events) {
        ev << r.run << ',' << Num(x.onset) << ',' << Num(x.offset) << ',' << x.label << '\n';
      }
      sc << r.run << ',' << e.labels[r.target] << ',' << r.score.events << ','
         << r.score.hits << ',' << r.score.false_alarms << ',' << Num(r.score.minutes) << '\n';
      total.events += r.score.events;
      total.hits += r.score.hits;
      total.false_alarms += r.score.false_alarms;
      total.minutes += r.score.minutes;
    }
    auto sum = OpenCsv(dir / "summary.csv");
    sum << "events,hits,hit_rate,false_alarms,false_alarms_per_minute\n";
    sum << total.events << ',' << total.hits << ','
        << Num(total.events ? static_cast<double>(total.hits) / total.events : 0.0) << ','
        << total.false_alarms << ','
        << Num(total.minutes > 0 ? total.false_alarms / total.minutes : 0.0) << '\n';
  };
  cmds.push_back(std::move(cmd));
}

std::vector<Rule> ParseRules(const std::string& text) {
  std::vector<Rule> rules;
  for (const auto& name : SplitList(text)) rules.push_back(ParseRule(name));
  if (rules.empty()) throw UsageError("--rules must not be empty");
  return rules;
}

std::string JoinRules(const std::vector<Rule>& rules) {
  std::string s;
  for (size_t i = 0; i < rules.size(); ++i) s += (i ? "," : "") + RuleName(rules[i]);
  return s;
}

std::string JoinNums(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + Num(v[i]);
  return s;
}

void BenchRulesCmd(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts {
    BenchRulesConfig cfg;
    double tau_m = 20.0, tau_s = 5.0, threshold = 0.2;
    std::string means, zetas, rules;
  };
  auto o = std::make_shared<Opts>();
  o->means = JoinNums(o->cfg.init_means);
  o->zetas = JoinNums(o->cfg.psd_zetas_ms);
  o->rules = JoinRules(o->cfg.rules);
  CLI::App* sub = root.add_subcommand(
      "bench-rules", "Epochs to reach an exact output spike count versus initial mean weight");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--afferents", o->cfg.n_afferents, "Afferents");
  sub->add_option("--rate-hz", o->cfg.rate_hz, "Poisson rate (Hz)");
  sub->add_option("--duration", o->cfg.duration_s, "Pattern duration (s)");
  sub->add_option("--tau-m", o->tau_m, "Membrane time constant (ms)");
  sub->add_option("--tau-s", o->tau_s, "Synaptic time constant (ms)");
  sub->add_option("--threshold", o->threshold, "Threshold");
  sub->add_option("--lambda", o->cfg.lambda, "Learning rate");
  sub->add_option("--momentum", o->cfg.momentum, "Momentum");
  sub->add_option("--init-std", o->cfg.init_std, "Initial weight standard deviation");
  sub->add_option("--init-means", o->means, "Initial mean weights");
  sub->add_option("--target-spikes", o->cfg.target_spikes, "Required output spikes");
  sub->add_option("--zetas", o->zetas, "PSD margins (ms)");
  sub->add_option("--rules", o->rules, "Rules (tdp, psd, tempotron)");
  sub->add_option("--seeds", o->cfg.seeds, "Patterns per initial mean");
  sub->add_option("--max-epochs", o->cfg.max_epochs, "Epoch limit");
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    BenchRulesConfig cfg = o->cfg;
    cfg.params = NeuronParams::Make(o->tau_m, o->tau_s, o->threshold);
    cfg.init_means = ParseDoubles(o->means, "--init-means");
    cfg.psd_zetas_ms = ParseDoubles(o->zetas, "--zetas");
    cfg.rules = ParseRules(o->rules);
    cfg.seed = c.common.seed;
    cfg.threads = c.common.threads;
    const auto rows = BenchRules(cfg);
    {
      auto os = OpenCsv(dir / "bench.csv");
      WriteBenchCsv(os, rows);
    }
    auto os = OpenCsv(dir / "bench_summary.csv");
    os << "rule,zeta_ms,init_mean,mean_epochs,converged_fraction\n";
    for (const auto& s : SummarizeBench(rows)) {
      os << RuleName(s.rule) << ',' << Num(s.zeta_ms) << ',' << Num(s.init_mean) << ','
         << Num(s.mean_epochs) << ',' << Num(s.converged_fraction) << '\n';
    }
  };
  cmds.push_back(std::move(cmd));
}

void ClassifySyntheticCmd(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts {
    SyntheticClassConfig cfg;
    double tau_m = 20.0, tau_s = 5.0, threshold = 1.0;
    std::string jitter_levels, deletion_levels, rules;
  };
  auto o = std::make_shared<Opts>();
  o->jitter_levels = JoinNums(o->cfg.jitter_levels_ms);
  o->deletion_levels = JoinNums(o->cfg.deletion_levels);
  o->rules = JoinRules(o->cfg.rules);
  CLI::App* sub = root.add_subcommand(
      "classify-synthetic", "Template spike-pattern classification under jitter and deletion");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--afferents", o->cfg.n_afferents, "Afferents");
  sub->add_option("--rate-hz", o->cfg.rate_hz, "Template rate (Hz)");
  sub->add_option("--duration", o->cfg.duration_s, "Pattern duration (s)");
  sub->add_option("--classes", o->cfg.n_classes, "Categories");
  sub->add_option("--tau-m", o->tau_m, "Membrane time constant (ms)");
  sub->add_option("--tau-s", o->tau_s, "Synaptic time constant (ms)");
  sub->add_option("--threshold", o->threshold, "Threshold");
  sub->add_option("--lambda", o->cfg.lambda, "Learning rate");
  sub->add_option("--momentum", o->cfg.momentum, "Momentum");
  sub->add_option("--init-mean", o->cfg.init_mean, "Initial weight mean");
  sub->add_option("--init-std", o->cfg.init_std, "Initial weight standard deviation");
  sub->add_option("--train-per-class", o->cfg.train_per_class, "Fresh noisy instances per epoch");
  sub->add_option("--max-epochs", o->cfg.max_epochs, "Epoch limit");
  sub->add_option("--test-per-class", o->cfg.test_per_class, "Test instances per level");
  sub->add_option("--train-jitter", o->cfg.train_jitter.sigma_jit_ms, "Training jitter (ms)");
  sub->add_option("--train-deletion", o->cfg.train_deletion.p_del, "Training deletion probability");
  sub->add_option("--jitter-levels", o->jitter_levels, "Test jitter levels (ms)");
  sub->add_option("--deletion-levels", o->deletion_levels, "Test deletion levels");
  sub->add_option("--tdp-target-lo", o->cfg.tdp_target_lo, "TDP: least target spikes");
  sub->add_option("--psd-spikes", o->cfg.psd_spikes, "PSD: desired spikes");
  sub->add_option("--rules", o->rules, "Rules");
  sub->add_option("--seeds", o->cfg.seeds, "Independent template sets");
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    SyntheticClassConfig cfg = o->cfg;
    cfg.params = NeuronParams::Make(o->tau_m, o->tau_s, o->threshold);
    cfg.jitter_levels_ms = ParseDoubles(o->jitter_levels, "--jitter-levels");
    cfg.deletion_levels = ParseDoubles(o->deletion_levels, "--deletion-levels");
    cfg.rules = ParseRules(o->rules);
    cfg.seed = c.common.seed;
    cfg.threads = c.common.threads;
    const auto rows = ClassifySynthetic(cfg);
    {
      auto os = OpenCsv(dir / "synthetic.csv");
      WriteSyntheticCsv(os, rows);
    }
    auto os = OpenCsv(dir / "synthetic_summary.csv");
    os << "noise_type,level,rule,scheme,mean_accuracy\n";
    for (const std::string type : {"jitter", "deletion"}) {
      const auto& levels = type == "jitter" ? cfg.jitter_levels_ms : cfg.deletion_levels;
      for (double level : levels) {
        for (Rule rule : cfg.rules) {
          for (Scheme scheme : {Scheme::kAbs, Scheme::kWta}) {
            os << type << ',' << Num(level) << ',' << RuleName(rule) << ','
               << SchemeName(scheme) << ','
               << Num(MeanAccuracy(rows, type, level, rule, scheme)) << '\n';
          }
        }
      }
    }
  };
  cmds.push_back(std::move(cmd));
}

void InhomogCmd(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto cmd = std::make_unique<Command>();
  struct Opts {
    InhomogConfig cfg;
    double tau_m = 20.0, tau_s = 5.0, threshold = 1.0;
    std::string nd = "1,2,3,4";
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = root.add_subcommand(
      "inhomog", "Learning an inhomogeneous rate profile against a matched homogeneous one");
  sub->option_defaults()->always_capture_default();
  AddCommon(sub, cmd->common);
  sub->add_option("--afferents", o->cfg.n_afferents, "Afferents");
  sub->add_option("--tau-m", o->tau_m, "Membrane time constant (ms)");
  sub->add_option("--tau-s", o->tau_s, "Synaptic time constant (ms)");
  sub->add_option("--threshold", o->threshold, "Threshold");
  sub->add_option("--lambda", o->cfg.lambda, "Learning rate");
  sub->add_option("--momentum", o->cfg.momentum, "Momentum");
  sub->add_option("--init-mean", o->cfg.init_mean, "Initial weight mean");
  sub->add_option("--init-std", o->cfg.init_std, "Initial weight standard deviation");
  sub->add_option("--nd", o->nd, "Least target spikes");
  sub->add_option("--runs", o->cfg.runs, "Runs per n_d");
  sub->add_option("--train-per-class", o->cfg.train_per_class, "Fresh patterns per class per epoch");
  sub->add_option("--max-epochs", o->cfg.max_epochs, "Epoch limit");
  sub->add_option("--test-per-class", o->cfg.test_per_class, "Test patterns per class");
  sub->add_option("--window", o->cfg.window_ms, "Half width around each peak (ms)");
  cmd->app = sub;
  cmd->run = [o](Command& c) {
    const fs::path dir = PrepareOut(c.common);
    InhomogConfig cfg = o->cfg;
    cfg.params = NeuronParams::Make(o->tau_m, o->tau_s, o->threshold);
    cfg.n_d = ParseInts(o->nd, "--nd");
    cfg.seed = c.common.seed;
    cfg.threads = c.common.threads;
    const auto runs = Inhomog(cfg);
    {
      auto os = OpenCsv(dir / "inhomog.csv");
      WriteInhomogCsv(os, runs);
    }
    {
      auto os = OpenCsv(dir / "inhomog_hist.csv");
      WriteInhomogHistogramCsv(os, runs, cfg.profile.duration);
    }
    auto os = OpenCsv(dir / "inhomog_summary.csv");
    os << "n_d,target_mean_out,null_mean_out,in_window_fraction\n";
    for (const auto& s : SummarizeInhomog(runs)) {
      os << s.n_d << ',' << Num(s.target_mean_out) << ',' << Num(s.null_mean_out) << ','
         << Num(s.in_window_fraction) << '\n';
    }
  };
  cmds.push_back(std::move(cmd));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spike-based environmental sound recognition", "spikesound"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> cmds;
  GenCorpus(app, cmds);
  Encode(app, cmds);
  Train(app, cmds);
  Eval(app, cmds);
  SweepNd(app, cmds);
  SweepEarly(app, cmds);
  SweepTrainRatio(app, cmds);
  StsCheckCmd(app, cmds);
  StreamCmd(app, cmds);
  BenchRulesCmd(app, cmds);
  ClassifySyntheticCmd(app, cmds);
  InhomogCmd(app, cmds);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  for (auto& cmd : cmds) {
    if (!cmd->app->parsed()) continue;
    try {
      if (!cmd->common.config.empty()) ApplyConfig(cmd->app, cmd->common.config);
      cmd->run(*cmd);
      EchoConfig(cmd->app, PrepareOut(cmd->common));
      return 0;
    } catch (const CLI::ParseError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}
