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

#ifndef SPIKESOUND_AUDIO_H_
#define SPIKESOUND_AUDIO_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spikesound/random.h"
#include "spikesound/spike_pattern.h"

namespace spikesound {

struct Waveform {
  std::vector<double> samples;  // nominally in [-1, 1]
  int sample_rate = 16000;

  double Duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

struct LabeledClip {
  Waveform waveform;
  std::string label;
  std::string source_id;
};

enum class AudioFormat { kWavPcm16, kRawPcm16 };

// PCM16 is scaled by 1/32768; multi-channel WAV is averaged to mono.
// `sample_rate` is used only for raw input. Throws DataError.
Waveform LoadAudio(const std::string& path, AudioFormat format,
                   int sample_rate = 16000);
Waveform DecodeWav(const std::vector<uint8_t>& bytes);
Waveform DecodeRawPcm16(const std::vector<uint8_t>& bytes, int sample_rate);

// Mono PCM16 RIFF; samples are rounded and clipped to the int16 range.
void SaveWav(const std::string& path, const Waveform& wave);
std::vector<uint8_t> EncodeWav(const Waveform& wave);

double MeanPower(const std::vector<double>& x);

// Amplitude factor putting `noise` at `snr_db` below `signal` (mean powers).
double SnrScale(double signal_power, double noise_power, double snr_db);

struct Mixture {
  Waveform mixed;
  double alpha = 0.0;
  size_t noise_offset = 0;
};

// signal + alpha * noise[offset, offset + len). The offset is drawn from
// `seed`. Throws std::invalid_argument on zero power, rate mismatch or short
// noise.
Mixture MixAtSnrDetailed(const Waveform& signal, const Waveform& noise,
                         double snr_db, uint64_t seed);
Waveform MixAtSnr(const Waveform& signal, const Waveform& noise, double snr_db,
                  uint64_t seed);

// Class names of the synthetic corpus in label order.
const std::vector<std::string>& SynthClassNames();

// Ten parameterized sound generators (tonal, harmonic, percussive, noisy);
// every file perturbs pitch, onset, amplitude and phases. n_classes <= 10.
std::vector<LabeledClip> SynthCorpus(int n_classes, int files_per_class,
                                     double duration_s, uint64_t seed,
                                     int sample_rate = 16000);

// Multi-talker babble: harmonic voices with drifting pitch, random vowel
// formants and syllabic envelopes.
Waveform BabbleNoise(double duration_s, uint64_t seed, int sample_rate = 16000,
                     int talkers = 32);

struct ModulatorParams {
  std::array<double, 3> frequencies{0.5, 1.0, 1.5};
  std::array<double, 3> amplitudes{1.0, 0.0, 0.0};
  std::array<double, 3> phases{0.0, 0.0, 0.0};
};

// Frequencies 0.5, 1 and 1.5 Hz; amplitudes in [0, 1], phases in [0, 2 pi).
ModulatorParams RandomModulatorParams(uint64_t seed);

struct ModulatedNoise {
  Waveform noise;
  std::vector<double> modulator;  // m(t) per sample, rescaled to [0, 1]
};

// m(t) = sum_i A_i sin(2 pi f_i t + phi_i), min-max mapped onto [0, 1] over
// the noise duration, multiplied into the noise. Throws on constant m(t).
ModulatedNoise ModulateNoise(const Waveform& noise,
                             const ModulatorParams& params);

struct StreamEvent {
  double onset = 0.0;   // s
  double offset = 0.0;  // s
  std::string label;
};

struct Stream {
  Waveform audio;
  std::vector<StreamEvent> events;  // sorted by onset
  std::vector<double> modulator;
  ModulatorParams modulator_params;
};

// Places every clip at a random non-overlapping onset (at least `min_gap_s`
// apart), adds modulated noise at `snr_db` against the clip power. The noise
// is looped when shorter than the stream.
Stream BuildStream(const std::vector<LabeledClip>& targets,
                   const std::vector<LabeledClip>& distractors,
                   const Waveform& noise, double snr_db, double duration_s,
                   uint64_t seed, double min_gap_s = 0.25);

}  // namespace spikesound

#endif  // SPIKESOUND_AUDIO_H_
