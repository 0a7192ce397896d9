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

#include "spikesound/encoding.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace spikesound {

void EncodingConfig::Validate() const {
  if (window_samples < 2 || !(hop > 0.0) || !(epsilon > 0.0) || d_t < 1 ||
      d_f < 1) {
    throw std::invalid_argument("encoding config: sizes must be positive");
  }
  if (!(beta_a >= 0.0 && beta_a <= 1.0) || !(beta_r > 0.0 && beta_r <= 1.0)) {
    throw std::invalid_argument(
        "encoding config: need beta_a in [0,1] and beta_r in (0,1]");
  }
}

Spectrogram Stft(const Waveform& wave, const EncodingConfig& cfg) {
  cfg.Validate();
  const int win = cfg.window_samples;
  const size_t n = wave.samples.size();
  if (n < static_cast<size_t>(win)) {
    throw std::invalid_argument("stft: clip shorter than one window");
  }
  const long hop = std::lround(cfg.hop * wave.sample_rate);
  if (hop < 1) throw std::invalid_argument("stft: hop below one sample");
  const int frames = static_cast<int>((n - win) / hop) + 1;
  const int bins = win / 2 + 1;

  std::vector<double> window(win);
  double energy = 0.0;
  for (int j = 0; j < win; ++j) {
    window[j] = 0.54 - 0.46 * std::cos(2.0 * M_PI * j / (win - 1));
    energy += window[j] * window[j];
  }
  // One-sided power spectral density: |X|^2 / (rate * sum w^2), doubled off
  // the DC and Nyquist bins.
  const double scale = 1.0 / (wave.sample_rate * energy);
  Spectrogram s;
  s.values.resize(bins, frames);
  s.frame_times.resize(frames);
  Eigen::FFT<double> fft;
  std::vector<double> frame(win);
  std::vector<std::complex<double>> spectrum;
  for (int t = 0; t < frames; ++t) {
    const size_t start = static_cast<size_t>(t) * hop;
    for (int j = 0; j < win; ++j) frame[j] = wave.samples[start + j] * window[j];
    fft.fwd(spectrum, frame);
    for (int f = 0; f < bins; ++f) {
      const bool edge = f == 0 || 2 * f == win;
      s.values(f, t) = (edge ? 1.0 : 2.0) * scale * std::norm(spectrum[f]);
    }
    s.frame_times[t] = static_cast<double>(start) / wave.sample_rate;
  }
  return s;
}

Spectrogram LogNormalize(const Spectrogram& s, double epsilon,
                         bool* degenerate) {
  if ((s.values.array() < 0.0).any()) {
    throw std::invalid_argument("log normalize: negative power");
  }
  Spectrogram out = s;
  out.values = ((s.values.array() + epsilon).log() - std::log(epsilon)).matrix();
  const double lo = out.values.minCoeff();
  const double hi = out.values.maxCoeff();
  const bool flat = !(hi > lo);
  if (degenerate) *degenerate = flat;
  if (flat) {
    std::cerr << "warning: constant spectrogram, emitting zeros\n";
    out.values.setZero();
  } else {
    out.values = ((out.values.array() - lo) / (hi - lo)).matrix();
  }
  return out;
}

KeyPointSet ExtractKeypoints(const Spectrogram& s, int d_t, int d_f) {
  const auto& m = s.values;
  const int bins = s.n_bins(), frames = s.n_frames();
  KeyPointSet out;
  for (int t = 0; t < frames; ++t) {
    const int t0 = std::max(0, t - d_t), t1 = std::min(frames - 1, t + d_t);
    for (int f = 0; f < bins; ++f) {
      const double v = m(f, t);
      const double time_max = m.row(f).segment(t0, t1 - t0 + 1).maxCoeff();
      bool key = v >= time_max;
      if (!key) {
        const int f0 = std::max(0, f - d_f), f1 = std::min(bins - 1, f + d_f);
        key = v >= m.col(t).segment(f0, f1 - f0 + 1).maxCoeff();
      }
      if (key) out.push_back({t, f, v});
    }
  }
  return out;
}

KeyPointSet MaskKeypoints(const KeyPointSet& points, const Spectrogram& s,
                          double beta_a, double beta_r, int d_t, int d_f) {
  const auto& m = s.values;
  const int bins = s.n_bins(), frames = s.n_frames();
  KeyPointSet out;
  for (const auto& p : points) {
    if (p.value < beta_a) continue;
    const int t0 = std::max(0, p.t - d_t), t1 = std::min(frames - 1, p.t + d_t);
    const int f0 = std::max(0, p.f - d_f), f1 = std::min(bins - 1, p.f + d_f);
    const double mean = m.block(f0, t0, f1 - f0 + 1, t1 - t0 + 1).mean();
    if (p.value * beta_r < mean) continue;
    out.push_back(p);
  }
  return out;
}

SpikePattern ToSpikePattern(const KeyPointSet& points, const Spectrogram& s) {
  SpikePattern pattern(s.n_bins(),
                       s.frame_times.empty() ? 0.0 : s.frame_times.back());
  for (const auto& p : points) {
    pattern.spikes[p.f].push_back(s.frame_times[p.t]);
  }
  for (auto& train : pattern.spikes) {
    std::sort(train.begin(), train.end());
    train.erase(std::unique(train.begin(), train.end()), train.end());
  }
  return pattern;
}

KeyPointSet EncodeKeypoints(const Waveform& wave, const EncodingConfig& cfg,
                            Spectrogram* normalized) {
  Spectrogram s = LogNormalize(Stft(wave, cfg), cfg.epsilon);
  KeyPointSet points = MaskKeypoints(ExtractKeypoints(s, cfg.d_t, cfg.d_f), s,
                                     cfg.beta_a, cfg.beta_r, cfg.d_t, cfg.d_f);
  if (normalized) *normalized = std::move(s);
  return points;
}

SpikePattern Encode(const Waveform& wave, const EncodingConfig& cfg) {
  Spectrogram s;
  KeyPointSet points = EncodeKeypoints(wave, cfg, &s);
  return ToSpikePattern(points, s);
}

SpikePattern EncodeStream(const Waveform& wave, const EncodingConfig& cfg,
                          double block_s) {
  const size_t n = wave.samples.size();
  const size_t block = static_cast<size_t>(std::llround(block_s * wave.sample_rate));
  if (block < static_cast<size_t>(cfg.window_samples) || n < block) {
    throw std::invalid_argument("stream encoding: block shorter than window or signal");
  }
  const size_t hop = std::max<size_t>(1, block / 2);
  std::vector<size_t> starts;
  for (size_t s = 0; s + block <= n; s += hop) starts.push_back(s);
  if (starts.back() + block < n) starts.push_back(n - block);

  SpikePattern out(cfg.window_samples / 2 + 1, wave.Duration());
  const double rate = wave.sample_rate;
  for (size_t k = 0; k < starts.size(); ++k) {
    const double center = (starts[k] + 0.5 * block) / rate;
    const double keep_lo =
        k == 0 ? -std::numeric_limits<double>::infinity()
               : 0.5 * (center + (starts[k - 1] + 0.5 * block) / rate);
    const double keep_hi =
        k + 1 == starts.size() ? std::numeric_limits<double>::infinity()
                               : 0.5 * (center + (starts[k + 1] + 0.5 * block) / rate);
    Waveform piece;
    piece.sample_rate = wave.sample_rate;
    piece.samples.assign(wave.samples.begin() + static_cast<std::ptrdiff_t>(starts[k]),
                         wave.samples.begin() + static_cast<std::ptrdiff_t>(starts[k] + block));
    const SpikePattern p = Encode(piece, cfg);
    const double offset = starts[k] / rate;
    for (int i = 0; i < p.n_afferents; ++i) {
      for (double t : p.spikes[i]) {
        const double abs_t = t + offset;
        if (abs_t >= keep_lo && abs_t < keep_hi) out.spikes[i].push_back(abs_t);
      }
    }
  }
  for (auto& train : out.spikes) {
    std::sort(train.begin(), train.end());
    train.erase(std::unique(train.begin(), train.end()), train.end());
  }
  return out;
}

}  // namespace spikesound
