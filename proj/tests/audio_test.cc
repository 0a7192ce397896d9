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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include <gtest/gtest.h>

#include "spikesound/audio.h"

namespace spikesound {
namespace {

Waveform Ramp(size_t n, int rate = 16000) {
  Waveform w;
  w.sample_rate = rate;
  for (size_t i = 0; i < n; ++i) w.samples.push_back(-1.0 + 2.0 * i / n);
  return w;
}

TEST(Wav, RoundTripWithinQuantization) {
  const Waveform w = Ramp(1000, 8000);
  const Waveform back = DecodeWav(EncodeWav(w));
  EXPECT_EQ(back.sample_rate, 8000);
  ASSERT_EQ(back.samples.size(), w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) {
    EXPECT_NEAR(back.samples[i], w.samples[i], 1.0 / 32768);
  }
}

TEST(Wav, ClipsOutOfRangeSamples) {
  Waveform w;
  w.samples = {2.0, -2.0};
  const Waveform back = DecodeWav(EncodeWav(w));
  EXPECT_NEAR(back.samples[0], 32767.0 / 32768, 1e-12);
  EXPECT_NEAR(back.samples[1], -1.0, 1e-12);
}

TEST(Wav, StereoIsAveraged) {
  std::vector<uint8_t> b = EncodeWav(Ramp(4));
  // Rewrite as a two-channel file with one frame (L=16384, R=0).
  std::vector<uint8_t> s(b.begin(), b.begin() + 44);
  s[22] = 2;                   // channels
  s[32] = 4;                   // block align
  s[28] = static_cast<uint8_t>(16000 * 4 & 0xff);
  s[29] = static_cast<uint8_t>((16000 * 4 >> 8) & 0xff);
  s[30] = static_cast<uint8_t>((16000 * 4 >> 16) & 0xff);
  s[40] = 4;
  s[41] = s[42] = s[43] = 0;
  s.insert(s.end(), {0x00, 0x40, 0x00, 0x00});
  const Waveform w = DecodeWav(s);
  ASSERT_EQ(w.samples.size(), 1u);
  EXPECT_NEAR(w.samples[0], 0.25, 1e-12);
}

TEST(Wav, MalformedInputIsDataError) {
  EXPECT_THROW(DecodeWav({}), DataError);
  EXPECT_THROW(DecodeWav({'R', 'I', 'F', 'F', 0, 0, 0, 0, 'A', 'V', 'I', ' '}), DataError);
  std::vector<uint8_t> b = EncodeWav(Ramp(8));
  b.resize(36);  // no data chunk
  EXPECT_THROW(DecodeWav(b), DataError);
  EXPECT_THROW(LoadAudio("/nonexistent/x.wav", AudioFormat::kWavPcm16), DataError);
}

TEST(RawPcm, DecodesLittleEndian) {
  const Waveform w = DecodeRawPcm16({0x00, 0x80, 0xff, 0x7f}, 8000);
  EXPECT_EQ(w.sample_rate, 8000);
  EXPECT_NEAR(w.samples[0], -1.0, 1e-12);
  EXPECT_NEAR(w.samples[1], 32767.0 / 32768, 1e-12);
  EXPECT_THROW(DecodeRawPcm16({0x00}, 8000), DataError);
}

TEST(Wav, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "spikesound_audio_test.wav";
  const Waveform w = Ramp(320);
  SaveWav(path.string(), w);
  const Waveform back = LoadAudio(path.string(), AudioFormat::kWavPcm16);
  EXPECT_EQ(back.samples.size(), 320u);
  std::filesystem::remove(path);
}

TEST(Mix, AchievesRequestedSnr) {
  const auto clips = SynthCorpus(3, 1, 0.5, 1);
  const Waveform noise = BabbleNoise(3.0, 2);
  for (double snr : {20.0, 0.0, -5.0}) {
    const Mixture m = MixAtSnrDetailed(clips[0].waveform, noise, snr, 9);
    std::vector<double> added(m.mixed.samples.size());
    for (size_t i = 0; i < added.size(); ++i) {
      added[i] = m.mixed.samples[i] - clips[0].waveform.samples[i];
    }
    const double measured =
        10.0 * std::log10(MeanPower(clips[0].waveform.samples) / MeanPower(added));
    EXPECT_NEAR(measured, snr, 1e-9);
    EXPECT_LE(m.noise_offset + added.size(), noise.samples.size());
  }
}

TEST(Mix, RejectsBadInputs) {
  const Waveform sig = Ramp(100);
  Waveform silent;
  silent.samples.assign(200, 0.0);
  EXPECT_THROW(MixAtSnr(sig, silent, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(MixAtSnr(sig, Ramp(50), 0.0, 1), std::invalid_argument);
  EXPECT_THROW(MixAtSnr(sig, Ramp(200, 8000), 0.0, 1), std::invalid_argument);
}

TEST(SynthCorpus, DeterministicAndLabeled) {
  const auto a = SynthCorpus(10, 3, 0.5, 42);
  const auto b = SynthCorpus(10, 3, 0.5, 42);
  ASSERT_EQ(a.size(), 30u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].waveform.samples, b[i].waveform.samples);
    EXPECT_EQ(a[i].label, SynthClassNames()[i / 3]);
    EXPECT_EQ(a[i].waveform.samples.size(), 8000u);
    EXPECT_GT(MeanPower(a[i].waveform.samples), 0.0);
  }
  // Files of one class differ.
  EXPECT_NE(a[0].waveform.samples, a[1].waveform.samples);
  EXPECT_THROW(SynthCorpus(11, 1, 0.5, 1), std::invalid_argument);
}

TEST(Babble, DeterministicAndBounded) {
  const Waveform a = BabbleNoise(1.0, 3);
  EXPECT_EQ(a.samples, BabbleNoise(1.0, 3).samples);
  EXPECT_NE(a.samples, BabbleNoise(1.0, 4).samples);
  EXPECT_EQ(a.samples.size(), 16000u);
  for (double x : a.samples) EXPECT_LE(std::abs(x), 1.0);
}

TEST(Modulator, RescaledToUnitInterval) {
  const ModulatedNoise m = ModulateNoise(BabbleNoise(4.0, 1), RandomModulatorParams(5));
  double lo = 1.0, hi = 0.0;
  for (double v : m.modulator) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_NEAR(lo, 0.0, 1e-12);
  EXPECT_NEAR(hi, 1.0, 1e-12);
  ModulatorParams flat;
  flat.amplitudes = {0.0, 0.0, 0.0};
  EXPECT_THROW(ModulateNoise(BabbleNoise(1.0, 1), flat), std::invalid_argument);
}

TEST(Stream, EventsDoNotOverlapAndCarryLabels) {
  const auto clips = SynthCorpus(3, 4, 0.5, 8);
  std::vector<LabeledClip> targets(clips.begin(), clips.begin() + 4);
  std::vector<LabeledClip> others(clips.begin() + 4, clips.end());
  const Stream s = BuildStream(targets, others, BabbleNoise(5.0, 2), -5.0, 20.0, 3);
  ASSERT_EQ(s.events.size(), 12u);
  EXPECT_EQ(s.audio.samples.size(), 320000u);
  int n_target = 0;
  for (size_t i = 0; i < s.events.size(); ++i) {
    n_target += s.events[i].label == targets[0].label;
    EXPECT_NEAR(s.events[i].offset - s.events[i].onset, 0.5, 1e-9);
    if (i > 0) EXPECT_GE(s.events[i].onset, s.events[i - 1].offset + 0.25 - 1e-9);
  }
  EXPECT_EQ(n_target, 4);
}

}  // namespace
}  // namespace spikesound
