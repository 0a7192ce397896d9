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

#include "spikesound/audio.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <stdexcept>

namespace spikesound {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open audio file " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(is),
                              std::istreambuf_iterator<char>());
}

uint32_t ReadU32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}
uint16_t ReadU16(const uint8_t* p) { return uint16_t(p[0] | p[1] << 8); }

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}
void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v));
  out.push_back(uint8_t(v >> 8));
}

}  // namespace

Waveform DecodeRawPcm16(const std::vector<uint8_t>& bytes, int sample_rate) {
  if (bytes.empty()) throw DataError("empty audio");
  if (bytes.size() % 2 != 0) throw DataError("raw pcm16: odd byte count");
  if (sample_rate <= 0) throw DataError("raw pcm16: sample rate must be positive");
  Waveform wave;
  wave.sample_rate = sample_rate;
  wave.samples.resize(bytes.size() / 2);
  for (size_t i = 0; i < wave.samples.size(); ++i) {
    const int16_t v = static_cast<int16_t>(ReadU16(&bytes[2 * i]));
    wave.samples[i] = v / 32768.0;
  }
  return wave;
}

Waveform DecodeWav(const std::vector<uint8_t>& bytes) {
  if (bytes.empty()) throw DataError("empty audio");
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError("wav: malformed header (missing RIFF/WAVE)");
  }
  int channels = 0, rate = 0, bits = 0;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    const size_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > bytes.size()) {
        throw DataError("wav: malformed fmt chunk");
      }
      const uint16_t fmt = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = static_cast<int>(ReadU32(chunk + 12));
      bits = ReadU16(chunk + 22);
      if (fmt != 1 && fmt != 0xFFFE) throw DataError("wav: not PCM");
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min(size, bytes.size() - body);
      break;
    }
    pos = body + size + (size & 1);
  }
  if (channels <= 0 || rate <= 0) throw DataError("wav: malformed header (no fmt)");
  if (bits != 16) {
    throw DataError("wav: unsupported bit depth " + std::to_string(bits));
  }
  if (!data) throw DataError("wav: malformed header (no data chunk)");
  const size_t frames = data_size / (2 * channels);
  if (frames == 0) throw DataError("empty audio");
  Waveform wave;
  wave.sample_rate = rate;
  wave.samples.resize(frames);
  for (size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      acc += static_cast<int16_t>(ReadU16(data + 2 * (f * channels + c))) / 32768.0;
    }
    wave.samples[f] = acc / channels;
  }
  return wave;
}

Waveform LoadAudio(const std::string& path, AudioFormat format,
                   int sample_rate) {
  const auto bytes = ReadFileBytes(path);
  return format == AudioFormat::kWavPcm16 ? DecodeWav(bytes)
                                          : DecodeRawPcm16(bytes, sample_rate);
}

std::vector<uint8_t> EncodeWav(const Waveform& wave) {
  const uint32_t data_bytes = static_cast<uint32_t>(wave.samples.size() * 2);
  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, static_cast<uint32_t>(wave.sample_rate));
  PutU32(out, static_cast<uint32_t>(wave.sample_rate * 2));
  PutU16(out, 2);
  PutU16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(out, data_bytes);
  for (double x : wave.samples) {
    const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
    PutU16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  return out;
}

void SaveWav(const std::string& path, const Waveform& wave) {
  const auto bytes = EncodeWav(wave);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path);
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
}

double MeanPower(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double SnrScale(double signal_power, double noise_power, double snr_db) {
  if (!(signal_power > 0.0) || !(noise_power > 0.0)) {
    throw std::invalid_argument("mix: zero-power signal or noise");
  }
  return std::sqrt(signal_power / (noise_power * std::pow(10.0, snr_db / 10.0)));
}

Mixture MixAtSnrDetailed(const Waveform& signal, const Waveform& noise,
                         double snr_db, uint64_t seed) {
  if (signal.sample_rate != noise.sample_rate) {
    throw std::invalid_argument("mix: sample rates differ");
  }
  const size_t n = signal.samples.size();
  if (noise.samples.size() < n) {
    throw std::invalid_argument("mix: noise shorter than signal");
  }
  Rng rng = MakeRng(seed, {0x6d6978});
  const size_t span = noise.samples.size() - n;
  Mixture mix;
  mix.noise_offset = span == 0 ? 0 : static_cast<size_t>(rng() % (span + 1));
  const auto first = noise.samples.begin() + static_cast<std::ptrdiff_t>(mix.noise_offset);
  std::vector<double> segment(first, first + static_cast<std::ptrdiff_t>(n));
  mix.alpha = SnrScale(MeanPower(signal.samples), MeanPower(segment), snr_db);
  mix.mixed.sample_rate = signal.sample_rate;
  mix.mixed.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    mix.mixed.samples[i] = signal.samples[i] + mix.alpha * segment[i];
  }
  return mix;
}

Waveform MixAtSnr(const Waveform& signal, const Waveform& noise, double snr_db,
                  uint64_t seed) {
  return MixAtSnrDetailed(signal, noise, snr_db, seed).mixed;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

const std::vector<std::string>& SynthClassNames() {
  static const std::vector<std::string> names = {
      "whistle", "ring", "phone", "metal", "kara",
      "horn",    "cymbals", "buzzer", "bottle", "bells"};
  return names;
}

namespace {

struct FileVariation {
  double pitch = 1.0;
  double onset = 0.0;  // s
  double amplitude = 0.5;
  std::array<double, 24> phase{};
};

// Sum of exponentially decaying partials struck at `strikes`.
double StruckPartials(double t, const std::vector<double>& strikes,
                      const std::vector<double>& freqs,
                      const std::vector<double>& amps,
                      const std::vector<double>& decays,
                      const FileVariation& v) {
  double s = 0.0;
  for (double t0 : strikes) {
    const double u = t - t0;
    if (u < 0.0) continue;
    for (size_t p = 0; p < freqs.size(); ++p) {
      s += amps[p] * std::exp(-decays[p] * u) *
           std::sin(kTwoPi * freqs[p] * v.pitch * u + v.phase[p]);
    }
  }
  return s;
}

// 1 until `hold`, then an exponential release with time constant `tau`.
double Release(double t, double hold, double tau) {
  return t < hold ? 1.0 : std::exp(-(t - hold) / tau);
}

std::vector<double> RenderClass(int cls, size_t n, int rate,
                                const FileVariation& v, Rng& rng) {
  std::vector<double> x(n, 0.0);
  const double p = v.pitch;
  std::vector<double> white;
  if (cls == 4 || cls == 6) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    white.resize(n);
    for (auto& w : white) w = gauss(rng);
  }
  double hp1 = 0.0, hp2 = 0.0, prev = 0.0, prev1 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate - v.onset;
    if (t < 0.0) continue;
    double s = 0.0;
    switch (cls) {
      case 0: {  // whistle: vibrato tone
        const double f = 2200.0 * p;
        s = std::sin(kTwoPi * f * t + 40.0 / 6.0 * std::sin(kTwoPi * 6.0 * t) +
                     v.phase[0]);
        break;
      }
      case 1: {  // ring: gated two-tone bell
        const double gate = std::fmod(t, 0.1) < 0.06 ? 1.0 : 0.0;
        s = gate * 0.5 *
            (std::sin(kTwoPi * 1100.0 * p * t + v.phase[0]) +
             std::sin(kTwoPi * 1650.0 * p * t + v.phase[1]));
        break;
      }
      case 2:  // phone: dual tone with slow AM
        s = 0.5 *
            (std::sin(kTwoPi * 697.0 * p * t + v.phase[0]) +
             std::sin(kTwoPi * 1209.0 * p * t + v.phase[1])) *
            (0.6 + 0.4 * std::sin(kTwoPi * 8.0 * t + v.phase[2]));
        break;
      case 3:  // metal: inharmonic strikes
        s = StruckPartials(t, {0.0, 0.22}, {520, 1430, 2790, 4610},
                           {1.0, 0.7, 0.5, 0.35}, {6, 9, 12, 16}, v);
        break;
      case 4: {  // kara: resonant click train
        const double u = std::fmod(t, 0.07);
        s = std::exp(-150.0 * u) *
                (std::sin(kTwoPi * 3500.0 * p * u) +
                 0.6 * std::sin(kTwoPi * 5200.0 * p * u)) +
            (u < 0.002 ? 0.5 * white[i] : 0.0);
        break;
      }
      case 5:  // horn: harmonic complex, 0.25 s blast
        for (int h = 1; h <= 8; ++h) {
          s += std::sin(kTwoPi * h * 350.0 * p * t + v.phase[h]) / h;
        }
        s *= 0.5 * Release(t, 0.25, 0.03);
        break;
      case 6: {  // cymbals: high-passed decaying noise
        hp1 = white[i] - prev;
        prev = white[i];
        hp2 = hp1 - prev1;
        prev1 = hp1;
        s = 0.25 * hp2 * std::exp(-8.0 * t);
        break;
      }
      case 7:  // buzzer: odd harmonics, 0.2 s burst
        for (int h = 1; h <= 21; h += 2) {
          s += std::sin(kTwoPi * h * 180.0 * p * t + v.phase[h]) / h;
        }
        s *= Release(t, 0.2, 0.02);
        break;
      case 8:  // bottle: repeated resonant knock
        s = StruckPartials(t, {0.0, 0.15, 0.30}, {750, 1500}, {1.0, 0.4},
                           {10, 14}, v);
        break;
      case 9:  // bells: slowly decaying inharmonic partials
        s = StruckPartials(t, {0.0}, {1200, 2640, 3900, 5400},
                           {1.0, 0.6, 0.4, 0.3}, {2, 3, 4, 5}, v);
        break;
      default:
        throw std::invalid_argument("synth corpus: unknown class");
    }
    const double fade_in = std::min(1.0, t / 0.005);
    x[i] = s * fade_in;
  }
  const double fade_out = 0.01 * rate;
  for (size_t k = 0; k < n && k < fade_out; ++k) x[n - 1 - k] *= k / fade_out;
  double peak = 0.0;
  for (double s : x) peak = std::max(peak, std::abs(s));
  if (peak > 0.0)
    for (double& s : x) s *= v.amplitude / peak;
  return x;
}

}  // namespace

std::vector<LabeledClip> SynthCorpus(int n_classes, int files_per_class,
                                     double duration_s, uint64_t seed,
                                     int sample_rate) {
  const auto& names = SynthClassNames();
  if (n_classes < 2 || n_classes > static_cast<int>(names.size())) {
    throw std::invalid_argument("synth corpus: n_classes must be in [2, 10]");
  }
  if (files_per_class < 1 || !(duration_s > 0.0)) {
    throw std::invalid_argument("synth corpus: bad size");
  }
  const size_t n = static_cast<size_t>(std::llround(duration_s * sample_rate));
  std::vector<LabeledClip> corpus;
  corpus.reserve(static_cast<size_t>(n_classes) * files_per_class);
  for (int c = 0; c < n_classes; ++c) {
    for (int f = 0; f < files_per_class; ++f) {
      Rng rng = MakeRng(seed, {0x636f7270, uint64_t(c), uint64_t(f)});
      FileVariation v;
      v.pitch = 1.0 + 0.08 * (Uniform01(rng) - 0.5);
      v.onset = 0.03 * Uniform01(rng);
      v.amplitude = 0.3 + 0.6 * Uniform01(rng);
      for (auto& ph : v.phase) ph = kTwoPi * Uniform01(rng);
      LabeledClip clip;
      clip.label = names[c];
      clip.source_id = names[c] + "_" + std::to_string(f);
      clip.waveform.sample_rate = sample_rate;
      clip.waveform.samples = RenderClass(c, n, sample_rate, v, rng);
      corpus.push_back(std::move(clip));
    }
  }
  return corpus;
}

Waveform BabbleNoise(double duration_s, uint64_t seed, int sample_rate,
                     int talkers) {
  const size_t n = static_cast<size_t>(std::llround(duration_s * sample_rate));
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.assign(n, 0.0);
  const double nyquist = 0.5 * sample_rate;
  const size_t block = static_cast<size_t>(0.01 * sample_rate);
  for (int k = 0; k < talkers; ++k) {
    Rng rng = MakeRng(seed, {0x626162, uint64_t(k)});
    const double f0_base = 100.0 + 140.0 * Uniform01(rng);
    const double drift_phase = kTwoPi * Uniform01(rng);
    const double jitter_phase = kTwoPi * Uniform01(rng);
    const int max_h = 40;
    std::vector<double> phase(max_h + 1, 0.0);
    for (auto& ph : phase) ph = kTwoPi * Uniform01(rng);
    std::vector<double> gain(max_h + 1, 0.0);
    double syl_start = -Uniform01(rng) * 0.2, syl_len = 0.0;
    double f1 = 0, f2 = 0, f3 = 0;
    bool voiced = false;
    for (size_t b0 = 0; b0 < n; b0 += block) {
      const double tb = static_cast<double>(b0) / sample_rate;
      if (tb >= syl_start + syl_len) {
        syl_start = std::max(0.0, syl_start + syl_len);
        syl_len = 0.12 + 0.18 * Uniform01(rng);
        voiced = Uniform01(rng) > 0.15;
        f1 = 300.0 + 550.0 * Uniform01(rng);
        f2 = 850.0 + 1450.0 * Uniform01(rng);
        f3 = 2300.0 + 700.0 * Uniform01(rng);
      }
      const double f0 = f0_base * (1.0 + 0.08 * std::sin(kTwoPi * 0.7 * tb + drift_phase) +
                                   0.04 * std::sin(kTwoPi * 3.1 * tb + jitter_phase));
      const double u = (tb - syl_start) / syl_len;
      const double env = voiced ? std::sin(M_PI * std::clamp(u, 0.0, 1.0)) : 0.0;
      for (int h = 1; h <= max_h; ++h) {
        const double fh = h * f0;
        if (fh > std::min(4000.0, nyquist)) {
          gain[h] = 0.0;
          continue;
        }
        auto bump = [fh](double fc, double bw) {
          const double z = (fh - fc) / bw;
          return std::exp(-0.5 * z * z);
        };
        gain[h] = env * (bump(f1, 90.0) + 0.7 * bump(f2, 130.0) +
                         0.4 * bump(f3, 200.0) + 0.05 / h);
      }
      const size_t b1 = std::min(n, b0 + block);
      for (int h = 1; h <= max_h; ++h) {
        if (gain[h] == 0.0) continue;
        const double dphi = kTwoPi * h * f0 / sample_rate;
        double ph = phase[h];
        for (size_t i = b0; i < b1; ++i) {
          out.samples[i] += gain[h] * std::sin(ph);
          ph += dphi;
        }
        phase[h] = std::fmod(ph, kTwoPi);
      }
      // keep harmonics that were silent in this block phase-continuous
      for (int h = 1; h <= max_h; ++h) {
        if (gain[h] == 0.0) {
          phase[h] = std::fmod(phase[h] + kTwoPi * h * f0 * (b1 - b0) / sample_rate, kTwoPi);
        }
      }
    }
  }
  double peak = 0.0;
  for (double s : out.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0)
    for (double& s : out.samples) s *= 0.5 / peak;
  return out;
}

ModulatorParams RandomModulatorParams(uint64_t seed) {
  Rng rng = MakeRng(seed, {0x6d6f64});
  ModulatorParams p;
  for (int i = 0; i < 3; ++i) {
    p.amplitudes[i] = Uniform01(rng);
    p.phases[i] = kTwoPi * Uniform01(rng);
  }
  return p;
}

ModulatedNoise ModulateNoise(const Waveform& noise,
                             const ModulatorParams& params) {
  if (noise.samples.empty()) throw std::invalid_argument("modulate: empty noise");
  for (double f : params.frequencies) {
    if (!(f > 0.0)) throw std::invalid_argument("modulate: frequencies must be positive");
  }
  const size_t n = noise.samples.size();
  ModulatedNoise out;
  out.modulator.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / noise.sample_rate;
    double m = 0.0;
    for (int k = 0; k < 3; ++k) {
      m += params.amplitudes[k] *
           std::sin(kTwoPi * params.frequencies[k] * t + params.phases[k]);
    }
    out.modulator[i] = m;
  }
  const auto [lo_it, hi_it] = std::minmax_element(out.modulator.begin(), out.modulator.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi - lo > 1e-12)) {
    throw std::invalid_argument("modulate: constant modulator cannot be rescaled");
  }
  out.noise.sample_rate = noise.sample_rate;
  out.noise.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out.modulator[i] = (out.modulator[i] - lo) / (hi - lo);
    out.noise.samples[i] = noise.samples[i] * out.modulator[i];
  }
  return out;
}

Stream BuildStream(const std::vector<LabeledClip>& targets,
                   const std::vector<LabeledClip>& distractors,
                   const Waveform& noise, double snr_db, double duration_s,
                   uint64_t seed, double min_gap_s) {
  if (noise.samples.empty()) throw std::invalid_argument("stream: empty noise");
  const int rate = noise.sample_rate;
  const size_t n = static_cast<size_t>(std::llround(duration_s * rate));
  std::vector<const LabeledClip*> clips;
  for (const auto& c : targets) clips.push_back(&c);
  for (const auto& c : distractors) clips.push_back(&c);
  Rng rng = MakeRng(seed, {0x737472});
  for (size_t i = clips.size(); i > 1; --i) {
    std::swap(clips[i - 1], clips[rng() % i]);
  }

  Stream stream;
  stream.audio.sample_rate = rate;
  stream.audio.samples.assign(n, 0.0);
  std::vector<double> clip_samples;
  for (const LabeledClip* clip : clips) {
    const auto& w = clip->waveform;
    if (w.sample_rate != rate) throw std::invalid_argument("stream: sample rates differ");
    if (w.samples.size() >= n) throw std::invalid_argument("stream: clip longer than stream");
    const double len = w.Duration();
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const double onset =
          std::floor(Uniform01(rng) * (duration_s - len) * rate) / rate;
      const double offset = onset + len;
      bool clash = false;
      for (const auto& e : stream.events) {
        if (onset < e.offset + min_gap_s && e.onset < offset + min_gap_s) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      stream.events.push_back({onset, offset, clip->label});
      const size_t start = static_cast<size_t>(std::llround(onset * rate));
      for (size_t i = 0; i < w.samples.size() && start + i < n; ++i) {
        stream.audio.samples[start + i] += w.samples[i];
      }
      clip_samples.insert(clip_samples.end(), w.samples.begin(), w.samples.end());
      placed = true;
    }
    if (!placed) {
      throw std::runtime_error("stream: cannot place all clips without overlap");
    }
  }
  std::sort(stream.events.begin(), stream.events.end(),
            [](const StreamEvent& a, const StreamEvent& b) { return a.onset < b.onset; });

  Waveform bed;
  bed.sample_rate = rate;
  bed.samples.resize(n);
  const size_t start = rng() % noise.samples.size();
  for (size_t i = 0; i < n; ++i) {
    bed.samples[i] = noise.samples[(start + i) % noise.samples.size()];
  }
  stream.modulator_params = RandomModulatorParams(SubSeed(seed, {0x6d6f64}));
  ModulatedNoise mod = ModulateNoise(bed, stream.modulator_params);
  const double alpha =
      clip_samples.empty()
          ? 1.0
          : SnrScale(MeanPower(clip_samples), MeanPower(mod.noise.samples), snr_db);
  for (size_t i = 0; i < n; ++i) {
    stream.audio.samples[i] += alpha * mod.noise.samples[i];
  }
  stream.modulator = std::move(mod.modulator);
  return stream;
}

}  // namespace spikesound
