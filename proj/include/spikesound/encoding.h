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

// Key-point spike encoding: STFT power spectrogram, log compression with
// global min-max normalization, local maxima along time or frequency, then
// absolute and relative-background masking. Every surviving key-point
// becomes one spike on the afferent of its frequency bin.

#ifndef SPIKESOUND_ENCODING_H_
#define SPIKESOUND_ENCODING_H_

#include <vector>

#include <Eigen/Dense>

#include "spikesound/audio.h"
#include "spikesound/spike_pattern.h"

namespace spikesound {

struct EncodingConfig {
  int window_samples = 256;
  double hop = 0.010;  // s
  double epsilon = 1e-5;
  int d_t = 4;
  int d_f = 4;
  double beta_a = 0.15;
  double beta_r = 0.85;

  void Validate() const;
};

// values(f, t): one column per frame, n_bins = window / 2 + 1 rows.
struct Spectrogram {
  Eigen::MatrixXd values;
  std::vector<double> frame_times;  // s, frame start = index * hop

  int n_bins() const { return static_cast<int>(values.rows()); }
  int n_frames() const { return static_cast<int>(values.cols()); }
};

struct KeyPoint {
  int t = 0;  // frame index
  int f = 0;  // bin index
  double value = 0.0;
  bool operator==(const KeyPoint&) const = default;
};

using KeyPointSet = std::vector<KeyPoint>;

// One-sided power spectral density of Hamming-windowed frames,
// |X|^2 / (rate * sum w^2) with off-edge bins doubled; the trailing partial
// frame is dropped. Throws if the clip is shorter than one
// window.
Spectrogram Stft(const Waveform& wave, const EncodingConfig& cfg);

// log(v + eps) - log(eps), then min-max to [0, 1]. A constant matrix maps to
// zeros; `degenerate` (if given) reports that case and a warning is logged.
Spectrogram LogNormalize(const Spectrogram& s, double epsilon,
                         bool* degenerate = nullptr);

// Cells equal to the max of their time line segment (t +- d_t) or of their
// frequency segment (f +- d_f), borders clamped. Ordered by (t, f).
KeyPointSet ExtractKeypoints(const Spectrogram& s, int d_t, int d_f);

// Drops points below beta_a, and points with value * beta_r below the mean of
// their clamped (2 d_t + 1) x (2 d_f + 1) neighbourhood (center included).
KeyPointSet MaskKeypoints(const KeyPointSet& points, const Spectrogram& s,
                          double beta_a, double beta_r, int d_t, int d_f);

// Afferent = bin, spike time = frame time; duplicates collapse. Duration is
// the last frame time.
SpikePattern ToSpikePattern(const KeyPointSet& points, const Spectrogram& s);

// Full pipeline.
SpikePattern Encode(const Waveform& wave, const EncodingConfig& cfg);
KeyPointSet EncodeKeypoints(const Waveform& wave, const EncodingConfig& cfg,
                            Spectrogram* normalized = nullptr);

// Long-signal encoding: blocks of `block_s` every block_s / 2, each encoded
// independently; each block contributes the spikes of its central half (the
// first and last blocks extend to the signal edges).
SpikePattern EncodeStream(const Waveform& wave, const EncodingConfig& cfg,
                          double block_s);

}  // namespace spikesound

#endif  // SPIKESOUND_ENCODING_H_
