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

#include "spikesound/experiments.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "spikesound/parallel.h"
#include "spikesound/random.h"

namespace spikesound {
namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::vector<double> EvenlySpacedTimes(int n, double duration_s) {
  std::vector<double> t;
  for (int k = 1; k <= n; ++k) t.push_back(k * duration_s / (n + 1));
  return t;
}

std::vector<BenchRow> BenchRules(const BenchRulesConfig& cfg) {
  struct Variant {
    Rule rule;
    double zeta_ms;
  };
  std::vector<Variant> variants;
  for (Rule r : cfg.rules) {
    if (r == Rule::kPsd) {
      for (double z : cfg.psd_zetas_ms) variants.push_back({r, z});
    } else {
      variants.push_back({r, 0.0});
    }
  }
  const size_t n_means = cfg.init_means.size();
  const size_t jobs = n_means * cfg.seeds;
  std::vector<std::vector<BenchRow>> out(jobs);
  ParallelFor(jobs, cfg.threads, [&](size_t job) {
    const int s = static_cast<int>(job / n_means);
    const double mean = cfg.init_means[job % n_means];
    const uint64_t base = SubSeed(cfg.seed, {0x62656e63, uint64_t(s)});
    const SpikePattern pattern =
        PoissonPattern(cfg.n_afferents, cfg.rate_hz, cfg.duration_s, SubSeed(base, {1}));
    // Same draw for every mean, shifted.
    const Eigen::VectorXd w0 =
        InitialWeights(cfg.n_afferents, mean, cfg.init_std, SubSeed(base, {2}));
    const TrainingSet set = FixedTrainingSet({pattern}, {0});
    for (const Variant& v : variants) {
      LearningConfig lc;
      lc.rule = v.rule;
      lc.lambda = cfg.lambda;
      lc.momentum = cfg.momentum;
      lc.zeta_ms = v.zeta_ms;
      lc.max_epochs = cfg.max_epochs;
      lc.target_range = {cfg.target_spikes, cfg.target_spikes};
      lc.desired_times = EvenlySpacedTimes(cfg.target_spikes, cfg.duration_s);
      const NeuronTrainResult r =
          TrainNeuron(set, 0, lc, cfg.params, w0, SubSeed(base, {3}));
      out[job].push_back({v.rule, v.zeta_ms, mean, s, r.epochs, r.converged});
    }
  });
  std::vector<BenchRow> rows;
  for (auto& v : out) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

void WriteBenchCsv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "rule,zeta_ms,init_mean,seed,epochs,converged\n";
  for (const auto& r : rows) {
    os << RuleName(r.rule) << ',' << Num(r.zeta_ms) << ',' << Num(r.init_mean)
       << ',' << r.seed << ',' << r.epochs << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

std::vector<BenchSummary> SummarizeBench(const std::vector<BenchRow>& rows) {
  std::vector<BenchSummary> out;
  std::vector<int> counts;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const BenchSummary& s) {
      return s.rule == r.rule && s.zeta_ms == r.zeta_ms && s.init_mean == r.init_mean;
    });
    if (it == out.end()) {
      out.push_back({r.rule, r.zeta_ms, r.init_mean, 0.0, 0.0});
      counts.push_back(0);
      it = out.end() - 1;
    }
    const size_t k = it - out.begin();
    it->mean_epochs += r.epochs;
    it->converged_fraction += r.converged;
    ++counts[k];
  }
  for (size_t k = 0; k < out.size(); ++k) {
    out[k].mean_epochs /= counts[k];
    out[k].converged_fraction /= counts[k];
  }
  return out;
}

LearningConfig SyntheticLearningConfig(const SyntheticClassConfig& cfg, Rule rule) {
  LearningConfig lc;
  lc.rule = rule;
  lc.lambda = cfg.lambda;
  lc.momentum = cfg.momentum;
  lc.max_epochs = cfg.max_epochs;
  lc.init_mean = cfg.init_mean;
  lc.init_std = cfg.init_std;
  lc.target_range = {cfg.tdp_target_lo, kUnbounded};
  lc.null_range = {0, 0};
  if (rule == Rule::kPsd) lc.desired_times = EvenlySpacedTimes(cfg.psd_spikes, cfg.duration_s);
  return lc;
}

std::vector<SyntheticRow> ClassifySynthetic(const SyntheticClassConfig& cfg) {
  if (cfg.n_classes < 2) throw std::invalid_argument("classify-synthetic: need >= 2 classes");
  struct NoiseType {
    std::string name;
    NoiseSpec train;
    std::vector<double> levels;
  };
  const std::vector<NoiseType> types = {
      {"jitter", cfg.train_jitter, cfg.jitter_levels_ms},
      {"deletion", cfg.train_deletion, cfg.deletion_levels}};
  const auto spec_at = [](const std::string& type, double level) {
    return type == "jitter" ? NoiseSpec{level, 0.0} : NoiseSpec{0.0, level};
  };

  std::vector<std::string> labels;
  for (int c = 0; c < cfg.n_classes; ++c) labels.push_back("class" + std::to_string(c));
  std::vector<int> train_labels;
  for (int c = 0; c < cfg.n_classes; ++c) {
    for (int j = 0; j < cfg.train_per_class; ++j) train_labels.push_back(c);
  }

  std::vector<std::vector<SyntheticRow>> out(cfg.seeds);
  ParallelFor(cfg.seeds, cfg.threads, [&](size_t s) {
    const uint64_t base = SubSeed(cfg.seed, {0x636c7366, s});
    std::vector<SpikePattern> templates;
    for (int c = 0; c < cfg.n_classes; ++c) {
      templates.push_back(PoissonPattern(cfg.n_afferents, cfg.rate_hz, cfg.duration_s,
                                         SubSeed(base, {1, uint64_t(c)})));
    }
    for (size_t t = 0; t < types.size(); ++t) {
      const NoiseType& type = types[t];
      TrainingSet set;
      set.n_afferents = cfg.n_afferents;
      set.labels = train_labels;
      set.draw = [&templates, &type, &set](size_t item, Rng& rng) {
        return Perturb(templates[set.labels[item]], type.train, rng());
      };
      // Test patterns shared by all rules.
      std::vector<std::vector<SpikePattern>> tests(type.levels.size());
      std::vector<int> test_labels;
      for (int c = 0; c < cfg.n_classes; ++c) {
        for (int j = 0; j < cfg.test_per_class; ++j) test_labels.push_back(c);
      }
      for (size_t l = 0; l < type.levels.size(); ++l) {
        for (size_t i = 0; i < test_labels.size(); ++i) {
          tests[l].push_back(Perturb(templates[test_labels[i]],
                                     spec_at(type.name, type.levels[l]),
                                     SubSeed(base, {2, t, l, i})));
        }
      }
      for (Rule rule : cfg.rules) {
        LearningConfig lc = SyntheticLearningConfig(cfg, rule);
        lc.seed = SubSeed(base, {3, t, uint64_t(rule)});
        const Model model = Train(set, labels, lc, cfg.params, 1);
        for (size_t l = 0; l < type.levels.size(); ++l) {
          std::vector<ResponseVector> responses;
          responses.reserve(tests[l].size());
          for (const SpikePattern& p : tests[l]) responses.push_back(Respond(model, p));
          for (Scheme scheme : {Scheme::kAbs, Scheme::kWta}) {
            ReadoutConfig rc;
            rc.scheme = scheme;
            const PatternEval e = EvaluateResponses(model, responses, test_labels, rc);
            out[s].push_back({type.name, type.levels[l], rule, scheme,
                              static_cast<int>(s), e.accuracy});
          }
        }
      }
    }
  });
  std::vector<SyntheticRow> rows;
  for (auto& v : out) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

void WriteSyntheticCsv(std::ostream& os, const std::vector<SyntheticRow>& rows) {
  os << "noise_type,level,rule,scheme,seed,accuracy\n";
  for (const auto& r : rows) {
    os << r.noise_type << ',' << Num(r.level) << ',' << RuleName(r.rule) << ','
       << SchemeName(r.scheme) << ',' << r.seed << ',' << Num(r.accuracy) << '\n';
  }
}

double MeanAccuracy(const std::vector<SyntheticRow>& rows,
                    const std::string& noise_type, double level, Rule rule,
                    Scheme scheme) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.noise_type == noise_type && std::abs(r.level - level) < 1e-12 &&
        r.rule == rule && r.scheme == scheme) {
      sum += r.accuracy;
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("mean accuracy: no matching rows");
  return sum / n;
}

std::vector<InhomogRun> Inhomog(const InhomogConfig& cfg) {
  const double matched = MatchedHomogeneousRate(cfg.profile);
  const double T = cfg.profile.duration;
  std::vector<double> centers;
  for (const auto& p : cfg.profile.peaks) centers.push_back(p.center_ms * 1e-3);

  const size_t jobs = cfg.n_d.size() * cfg.runs;
  std::vector<InhomogRun> out(jobs);
  ParallelFor(jobs, cfg.threads, [&](size_t job) {
    const int nd = cfg.n_d[job / cfg.runs];
    const int run = static_cast<int>(job % cfg.runs);
    if (nd < 1) throw std::invalid_argument("inhomog: n_d must be >= 1");
    // Runs share seeds across n_d so curves compare like with like.
    const uint64_t base = SubSeed(cfg.seed, {0x696e686d, uint64_t(run)});
    const auto draw = [&](int label, uint64_t seed) {
      return label == 0 ? InhomogeneousPattern(cfg.profile, cfg.n_afferents, seed)
                        : PoissonPattern(cfg.n_afferents, matched, T, seed);
    };
    TrainingSet set;
    set.n_afferents = cfg.n_afferents;
    for (int c = 0; c < 2; ++c) {
      for (int j = 0; j < cfg.train_per_class; ++j) set.labels.push_back(c);
    }
    set.draw = [&](size_t item, Rng& rng) { return draw(set.labels[item], rng()); };

    LearningConfig lc;
    lc.rule = Rule::kTdp;
    lc.lambda = cfg.lambda;
    lc.momentum = cfg.momentum;
    lc.max_epochs = cfg.max_epochs;
    lc.target_range = {nd, kUnbounded};
    lc.null_range = {0, 0};
    const Eigen::VectorXd w0 =
        InitialWeights(cfg.n_afferents, cfg.init_mean, cfg.init_std, SubSeed(base, {1}));
    const NeuronTrainResult tr = TrainNeuron(set, 0, lc, cfg.params, w0, SubSeed(base, {2}));

    InhomogRun r;
    r.n_d = nd;
    r.run = run;
    r.epochs = tr.epochs;
    int target_total = 0, null_total = 0;
    for (int j = 0; j < cfg.test_per_class; ++j) {
      for (int c = 0; c < 2; ++c) {
        const SpikePattern p = draw(c, SubSeed(base, {3, uint64_t(c), uint64_t(j)}));
        const SimResult sim = Simulate(p, tr.w, cfg.params);
        auto& times = c == 0 ? r.target_times : r.null_times;
        times.insert(times.end(), sim.output_spikes.begin(), sim.output_spikes.end());
        (c == 0 ? target_total : null_total) += sim.n_out;
      }
    }
    r.target_mean_out = static_cast<double>(target_total) / cfg.test_per_class;
    r.null_mean_out = static_cast<double>(null_total) / cfg.test_per_class;
    r.target_spikes = target_total;
    for (double t : r.target_times) {
      for (double c : centers) {
        if (std::abs(t - c) <= cfg.window_ms * 1e-3) {
          ++r.target_in_window;
          break;
        }
      }
    }
    out[job] = std::move(r);
  });
  return out;
}

std::vector<InhomogSummary> SummarizeInhomog(const std::vector<InhomogRun>& runs) {
  std::map<int, std::tuple<double, double, long, long, int>> acc;
  for (const auto& r : runs) {
    auto& [t, n, in, total, count] = acc[r.n_d];
    t += r.target_mean_out;
    n += r.null_mean_out;
    in += r.target_in_window;
    total += r.target_spikes;
    ++count;
  }
  std::vector<InhomogSummary> out;
  for (const auto& [nd, v] : acc) {
    const auto& [t, n, in, total, count] = v;
    out.push_back({nd, t / count, n / count,
                   total ? static_cast<double>(in) / total : 0.0});
  }
  return out;
}

void WriteInhomogCsv(std::ostream& os, const std::vector<InhomogRun>& runs) {
  os << "n_d,run,epochs,target_mean_out,null_mean_out,in_window_fraction\n";
  for (const auto& r : runs) {
    const double frac =
        r.target_spikes ? static_cast<double>(r.target_in_window) / r.target_spikes : 0.0;
    os << r.n_d << ',' << r.run << ',' << r.epochs << ',' << Num(r.target_mean_out)
       << ',' << Num(r.null_mean_out) << ',' << Num(frac) << '\n';
  }
}

void WriteInhomogHistogramCsv(std::ostream& os, const std::vector<InhomogRun>& runs,
                              double duration_s) {
  const double bin = 0.010;
  const int bins = std::max(1, static_cast<int>(std::ceil(duration_s / bin - 1e-9)));
  std::map<int, std::vector<std::vector<long>>> hist;
  for (const auto& r : runs) {
    auto& h = hist[r.n_d];
    if (h.empty()) h.assign(2, std::vector<long>(bins, 0));
    for (int c = 0; c < 2; ++c) {
      for (double t : c == 0 ? r.target_times : r.null_times) {
        const int b = std::clamp(static_cast<int>(t / bin), 0, bins - 1);
        ++h[c][b];
      }
    }
  }
  os << "n_d,class,bin_start_s,count\n";
  for (const auto& [nd, h] : hist) {
    for (int c = 0; c < 2; ++c) {
      for (int b = 0; b < bins; ++b) {
        os << nd << ',' << (c == 0 ? "target" : "null") << ',' << Num(b * bin) << ','
           << h[c][b] << '\n';
      }
    }
  }
}

StsCase MakeStsCase(const StsCheckConfig& cfg, int index) {
  if (cfg.max_afferents < 10 || !(cfg.max_duration_s >= 0.1)) {
    throw std::invalid_argument("sts-check: need max_afferents >= 10 and duration >= 0.1 s");
  }
  Rng rng = MakeRng(cfg.seed, {0x73747363, uint64_t(index)});
  const int n = 10 + static_cast<int>(rng() % (cfg.max_afferents - 9));
  const double T = 0.1 + (cfg.max_duration_s - 0.1) * Uniform01(rng);
  const double rate = 5.0 + 35.0 * Uniform01(rng);
  StsCase c;
  c.pattern = PoissonPattern(n, rate, T, rng());
  const double scale = 10.0 / std::max(1.0, n * rate * T);
  std::normal_distribution<double> gauss(0.0, 1.0);
  c.w.resize(n);
  for (int i = 0; i < n; ++i) c.w[i] = scale * (0.5 + gauss(rng));
  return c;
}

std::vector<StsCheckRow> StsCheck(const StsCheckConfig& cfg) {
  if (cfg.k_max < 1 || cfg.grad_k_max < 1) {
    throw std::invalid_argument("sts-check: k ranges must be >= 1");
  }
  std::vector<std::vector<StsCheckRow>> out(cfg.cases);
  ParallelFor(cfg.cases, cfg.threads, [&](size_t index) {
    const StsCase c = MakeStsCase(cfg, static_cast<int>(index));
    const InputEvents events = BuildEvents(c.pattern, c.w);
    std::vector<StsCheckRow>& rows = out[index];
    double prev = std::numeric_limits<double>::infinity();
    std::vector<int> defined;
    for (int k = 1; k <= cfg.k_max; ++k) {
      StsCheckRow row;
      row.case_id = static_cast<int>(index);
      row.k = k;
      const auto cp = FindCriticalThreshold(events, cfg.params, k, 1e-12);
      if (!cp) {
        row.theta_star = std::numeric_limits<double>::quiet_NaN();
        row.bracket_ok = true;
        rows.push_back(row);
        continue;
      }
      defined.push_back(k);
      row.theta_star = cp->value;
      const int below =
          CountSpikes(events, cfg.params.WithThreshold(cp->value * (1.0 - cfg.bracket_rel)));
      const int above =
          CountSpikes(events, cfg.params.WithThreshold(cp->value * (1.0 + cfg.bracket_rel)));
      row.bracket_ok = below >= k && above < k && cp->value <= prev;
      prev = cp->value;
      rows.push_back(row);
    }
    std::vector<int> eligible;
    for (int k : defined) {
      if (k <= cfg.grad_k_max) eligible.push_back(k);
    }
    if (eligible.empty()) return;
    Rng rng = MakeRng(cfg.seed, {0x67726164, index});
    const int k = eligible[rng() % eligible.size()];
    const CriticalGradient g = CriticalThresholdGrad(c.pattern, c.w, k, cfg.params);
    const FdGradient fd = FdGradientOracle(c.pattern, c.w, k, cfg.params);
    const double floor = cfg.grad_abs_tol / cfg.grad_rel_tol;
    double err = 0.0;
    for (int i = 0; i < c.w.size(); ++i) {
      if (!fd.available[i]) continue;
      err = std::max(err, std::abs(g.dtheta_dw[i] - fd.value[i]) /
                              std::max(std::abs(fd.value[i]), floor));
    }
    StsCheckRow& row = rows[k - 1];
    row.gradient_checked = true;
    row.grad_max_rel_err = err;
    row.degenerate = !g.differentiable;
    row.reason = g.reason;
  });
  std::vector<StsCheckRow> rows;
  for (auto& v : out) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

void WriteStsCheckCsv(std::ostream& os, const std::vector<StsCheckRow>& rows) {
  os << "case,k,theta_star,bracket_ok,grad_max_rel_err,degenerate\n";
  for (const auto& r : rows) {
    os << r.case_id << ',' << r.k << ',';
    if (!std::isnan(r.theta_star)) os << Num(r.theta_star);
    os << ',' << (r.bracket_ok ? 1 : 0) << ',';
    if (r.gradient_checked) os << Num(r.grad_max_rel_err);
    os << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
}

}  // namespace spikesound
