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

#include "spikesound/neuron.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <utility>

namespace spikesound {

NeuronParams NeuronParams::Make(double tau_m, double tau_s, double threshold) {
  if (!(tau_s > 0.0) || !(tau_m > tau_s)) {
    throw std::invalid_argument("neuron params: need tau_m > tau_s > 0");
  }
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("neuron params: threshold must be positive");
  }
  NeuronParams p;
  p.tau_m = tau_m;
  p.tau_s = tau_s;
  p.threshold = threshold;
  const double t_peak = p.PeakTime();
  p.v0 = 1.0 / (std::exp(-t_peak / tau_m) - std::exp(-t_peak / tau_s));
  return p;
}

double NeuronParams::PeakTime() const {
  return tau_m * tau_s / (tau_m - tau_s) * std::log(tau_m / tau_s);
}

double PspKernel(double dt_ms, const NeuronParams& params) {
  if (dt_ms <= 0.0) return 0.0;
  return params.v0 *
         (std::exp(-dt_ms / params.tau_m) - std::exp(-dt_ms / params.tau_s));
}

InputEvents BuildEvents(const SpikePattern& pattern, const Eigen::VectorXd& w) {
  if (w.size() != pattern.n_afferents) {
    throw std::invalid_argument("simulate: weight count " +
                                std::to_string(w.size()) + " != afferents " +
                                std::to_string(pattern.n_afferents));
  }
  if (!w.allFinite()) throw std::invalid_argument("simulate: non-finite weights");
  std::vector<std::pair<double, double>> raw;
  raw.reserve(pattern.TotalSpikes());
  for (int i = 0; i < pattern.n_afferents; ++i) {
    for (double t : pattern.spikes[i]) raw.emplace_back(t * 1e3, w[i]);
  }
  std::sort(raw.begin(), raw.end());
  InputEvents ev;
  ev.duration_ms = pattern.duration * 1e3;
  for (const auto& [t, wi] : raw) {
    if (!ev.time_ms.empty() && ev.time_ms.back() == t) {
      ev.weight.back() += wi;
    } else {
      ev.time_ms.push_back(t);
      ev.weight.push_back(wi);
    }
  }
  return ev;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootTolMs = 1e-11;

// Membrane potential over one inter-event interval, relative to its origin:
//   V(d) = a * exp(-d / tau_m) - b * exp(-d / tau_s).
// The reset history is folded into `a`.
class Integrator {
 public:
  Integrator(const NeuronParams& params, const SimOptions& options,
             SimResult* result)
      : tau_m_(params.tau_m),
        tau_s_(params.tau_s),
        theta_(params.threshold),
        v0_(params.v0),
        rate_gap_(1.0 / params.tau_s - 1.0 / params.tau_m),
        options_(options),
        result_(result) {}

  bool stopped() const { return stopped_; }

  void Run(const InputEvents& ev) {
    for (size_t k = 0; k < ev.time_ms.size() && !stopped_; ++k) {
      const double t = ev.time_ms[k];
      if (k == 0) {
        t0_ = t;
      } else {
        Advance(t - t0_);
        if (stopped_) break;
        const double d = t - t0_;
        a_ *= std::exp(-d / tau_m_);
        b_ *= std::exp(-d / tau_s_);
        t0_ = t;
      }
      const double slope_before = Slope(0.0);
      a_ += v0_ * ev.weight[k];
      b_ += v0_ * ev.weight[k];
      if (options_.record_peaks && slope_before > 0.0 && Slope(0.0) < 0.0) {
        result_->peaks.push_back({t0_ * 1e-3, a_ - b_, true});
      }
    }
    if (!stopped_ && !ev.time_ms.empty()) Advance(kInf);
  }

  double t_max_ms() const { return t_max_ms_; }

 private:
  double V(double d) const {
    return a_ * std::exp(-d / tau_m_) - b_ * std::exp(-d / tau_s_);
  }
  double Slope(double d) const {
    return -a_ / tau_m_ * std::exp(-d / tau_m_) +
           b_ / tau_s_ * std::exp(-d / tau_s_);
  }

  void Consider(double v, double d) {
    if (v > result_->v_max) {
      result_->v_max = v;
      t_max_ms_ = t0_ + d;
    }
  }

  // Stationary point of V inside (0, len), or -1.
  double Stationary(double len) const {
    if (a_ == 0.0 || b_ == 0.0) return -1.0;
    const double ratio = (b_ * tau_m_) / (a_ * tau_s_);
    if (!(ratio > 1.0)) return -1.0;
    const double d = std::log(ratio) / rate_gap_;
    return d < len ? d : -1.0;
  }

  // Root of V(d) = theta on [lo, hi] where V is increasing and
  // V(lo) < theta <= V(hi). Safeguarded Newton.
  double Crossing(double lo, double hi) const {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = V(x) - theta_;
      if (f < 0.0) {
        lo = x;
      } else {
        hi = x;
      }
      const double df = Slope(x);
      double next = df > 0.0 ? x - f / df : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - x);
      x = next;
      if (step < kRootTolMs || hi - lo < kRootTolMs) break;
    }
    return x;
  }

  void Fire(double d) {
    const double slope = Slope(d);
    a_ = a_ * std::exp(-d / tau_m_) - theta_;
    b_ *= std::exp(-d / tau_s_);
    t0_ += d;
    Consider(theta_, 0.0);
    result_->output_spikes.push_back(t0_ * 1e-3);
    if (options_.record_peaks) result_->spike_slopes.push_back(slope);
    ++result_->n_out;
    if (options_.max_spikes > 0 && result_->n_out >= options_.max_spikes) {
      stopped_ = true;
      result_->truncated = true;
    }
  }

  // Follows V over [t0, t0 + len), emitting every threshold crossing.
  void Advance(double len) {
    while (true) {
      const double stat = Stationary(len);
      const double ends[2] = {stat > 0.0 ? stat : len, len};
      const int n_pieces = stat > 0.0 ? 2 : 1;
      double lo = 0.0;
      double f_lo = a_ - b_ - theta_;
      bool fired = false;
      for (int p = 0; p < n_pieces; ++p) {
        const double hi = ends[p];
        const double f_hi = std::isinf(hi) ? -theta_ : V(hi) - theta_;
        if (f_lo < 0.0 && f_hi >= 0.0) {
          const double d = Crossing(lo, hi);
          Fire(d);
          len -= d;
          fired = true;
          break;
        }
        lo = hi;
        f_lo = f_hi;
      }
      if (stopped_) return;
      if (fired) continue;
      if (stat > 0.0 && a_ > 0.0) {
        const double v = V(stat);
        Consider(v, stat);
        if (options_.record_peaks) {
          result_->peaks.push_back({(t0_ + stat) * 1e-3, v, false});
        }
      }
      if (!std::isinf(len)) Consider(V(len), len);
      return;
    }
  }

  const double tau_m_, tau_s_, theta_, v0_, rate_gap_;
  const SimOptions& options_;
  SimResult* result_;
  double a_ = 0.0, b_ = 0.0, t0_ = 0.0;
  double t_max_ms_ = 0.0;
  bool stopped_ = false;
};

void FillTrace(const InputEvents& ev, const NeuronParams& params,
               const SimOptions& options, SimResult* result) {
  const double step = options.trace_step_ms;
  if (!(step > 0.0)) throw std::invalid_argument("trace step must be positive");
  const double horizon = std::max(ev.duration_ms,
                                  ev.time_ms.empty() ? 0.0 : ev.time_ms.back());
  const size_t n = static_cast<size_t>(std::floor(horizon / step)) + 1;
  const double dm = std::exp(-step / params.tau_m);
  const double ds = std::exp(-step / params.tau_s);
  result->trace.assign(n, 0.0);
  result->trace_step = step * 1e-3;
  // Accumulators valid at the current grid time.
  double am = 0.0, bs = 0.0;
  size_t next_in = 0, next_out = 0;
  for (size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * step;
    if (k > 0) {
      am *= dm;
      bs *= ds;
    }
    while (next_in < ev.time_ms.size() && ev.time_ms[next_in] <= t) {
      const double d = t - ev.time_ms[next_in];
      am += params.v0 * ev.weight[next_in] * std::exp(-d / params.tau_m);
      bs += params.v0 * ev.weight[next_in] * std::exp(-d / params.tau_s);
      ++next_in;
    }
    while (next_out < result->output_spikes.size() &&
           result->output_spikes[next_out] * 1e3 <= t) {
      const double d = t - result->output_spikes[next_out] * 1e3;
      am -= params.threshold * std::exp(-d / params.tau_m);
      ++next_out;
    }
    result->trace[k] = am - bs;
  }
}

}  // namespace

SimResult Simulate(const InputEvents& events, const NeuronParams& params,
                   const SimOptions& options) {
  SimResult result;
  Integrator integrator(params, options, &result);
  integrator.Run(events);
  result.t_max = integrator.t_max_ms() * 1e-3;
  if (options.record_trace) FillTrace(events, params, options, &result);
  return result;
}

SimResult Simulate(const SpikePattern& pattern, const Eigen::VectorXd& w,
                   const NeuronParams& params, const SimOptions& options) {
  return Simulate(BuildEvents(pattern, w), params, options);
}

int CountSpikes(const InputEvents& events, const NeuronParams& params, int cap) {
  SimOptions options;
  options.max_spikes = cap;
  SimResult result;
  Integrator integrator(params, options, &result);
  integrator.Run(events);
  return result.n_out;
}

void WriteTraceCsv(const std::string& path, const SimResult& result) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path);
  os << "time_s,voltage\n";
  char buf[64];
  for (size_t k = 0; k < result.trace.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.9g\n",
                  static_cast<double>(k) * result.trace_step, result.trace[k]);
    os << buf;
  }
}

}  // namespace spikesound
