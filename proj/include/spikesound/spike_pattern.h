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

#ifndef SPIKESOUND_SPIKE_PATTERN_H_
#define SPIKESOUND_SPIKE_PATTERN_H_

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikesound {

// Thrown for malformed or missing input data (files, headers, corpora).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-afferent spike times in seconds. Times are sorted per afferent and lie
// in [0, duration].
struct SpikePattern {
  int n_afferents = 0;
  double duration = 0.0;
  std::vector<std::vector<double>> spikes;

  SpikePattern() = default;
  SpikePattern(int n, double duration_s)
      : n_afferents(n), duration(duration_s), spikes(n) {}

  size_t TotalSpikes() const;
  bool operator==(const SpikePattern&) const = default;
};

// Checks the sort and range invariants; throws std::invalid_argument.
void Validate(const SpikePattern& pattern);

// Drops spikes later than `cutoff_s`; the duration becomes the cutoff.
SpikePattern Truncate(const SpikePattern& pattern, double cutoff_s);

// SPKPAT v1 text interchange: header `SPKPAT v1 <n_afferents> <duration_s>`
// followed by `<afferent> <time_s>` lines in time order, 9 significant digits.
void WriteSpkPat(std::ostream& os, const SpikePattern& pattern);
SpikePattern ReadSpkPat(std::istream& is);
void SaveSpkPat(const std::string& path, const SpikePattern& pattern);
SpikePattern LoadSpkPat(const std::string& path);

}  // namespace spikesound

#endif  // SPIKESOUND_SPIKE_PATTERN_H_
