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

#include "spikesound/spike_pattern.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace spikesound {

size_t SpikePattern::TotalSpikes() const {
  size_t n = 0;
  for (const auto& s : spikes) n += s.size();
  return n;
}

void Validate(const SpikePattern& pattern) {
  if (pattern.n_afferents < 0 ||
      static_cast<int>(pattern.spikes.size()) != pattern.n_afferents) {
    throw std::invalid_argument("spike pattern: afferent count mismatch");
  }
  for (const auto& train : pattern.spikes) {
    if (!std::is_sorted(train.begin(), train.end())) {
      throw std::invalid_argument("spike pattern: unsorted afferent train");
    }
    if (!train.empty() && (train.front() < 0.0 || train.back() > pattern.duration ||
                           !std::isfinite(train.back()))) {
      throw std::invalid_argument("spike pattern: spike outside [0, duration]");
    }
  }
}

SpikePattern Truncate(const SpikePattern& pattern, double cutoff_s) {
  SpikePattern out(pattern.n_afferents, cutoff_s);
  for (int i = 0; i < pattern.n_afferents; ++i) {
    const auto& src = pattern.spikes[i];
    auto end = std::upper_bound(src.begin(), src.end(), cutoff_s);
    out.spikes[i].assign(src.begin(), end);
  }
  return out;
}

namespace {

std::string Format9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void WriteSpkPat(std::ostream& os, const SpikePattern& pattern) {
  std::vector<std::pair<double, int>> events;
  events.reserve(pattern.TotalSpikes());
  for (int i = 0; i < pattern.n_afferents; ++i) {
    for (double t : pattern.spikes[i]) events.emplace_back(t, i);
  }
  std::sort(events.begin(), events.end());
  os << "SPKPAT v1 " << pattern.n_afferents << ' ' << Format9(pattern.duration)
     << '\n';
  for (const auto& [t, i] : events) os << i << ' ' << Format9(t) << '\n';
}

SpikePattern ReadSpkPat(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("SPKPAT: empty input");
  std::istringstream header(line);
  std::string magic, version;
  int n = -1;
  double duration = -1.0;
  header >> magic >> version >> n >> duration;
  if (magic != "SPKPAT") throw DataError("SPKPAT: not a spike pattern file");
  if (version != "v1") throw DataError("SPKPAT: unsupported version " + version);
  if (!header || n < 0 || !(duration >= 0.0)) {
    throw DataError("SPKPAT: malformed header");
  }
  SpikePattern pattern(n, duration);
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    int afferent;
    double t;
    if (!(row >> afferent >> t) || afferent < 0 || afferent >= n) {
      throw DataError("SPKPAT: bad spike at line " + std::to_string(line_no));
    }
    pattern.spikes[afferent].push_back(t);
  }
  for (auto& train : pattern.spikes) std::sort(train.begin(), train.end());
  return pattern;
}

void SaveSpkPat(const std::string& path, const SpikePattern& pattern) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path);
  WriteSpkPat(os, pattern);
}

SpikePattern LoadSpkPat(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path);
  return ReadSpkPat(is);
}

}  // namespace spikesound
