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

#include <sstream>

#include <gtest/gtest.h>

#include "spikesound/spike_pattern.h"

namespace spikesound {
namespace {

SpikePattern Sample() {
  SpikePattern p(3, 0.5);
  p.spikes[0] = {0.01, 0.123456789};
  p.spikes[2] = {0.0, 0.5};
  return p;
}

TEST(SpikePattern, TotalAndValidate) {
  const SpikePattern p = Sample();
  EXPECT_EQ(p.TotalSpikes(), 4u);
  EXPECT_NO_THROW(Validate(p));
  SpikePattern bad = p;
  bad.spikes[0] = {0.2, 0.1};
  EXPECT_THROW(Validate(bad), std::invalid_argument);
  bad = p;
  bad.spikes[1] = {0.6};
  EXPECT_THROW(Validate(bad), std::invalid_argument);
  bad = p;
  bad.spikes.pop_back();
  EXPECT_THROW(Validate(bad), std::invalid_argument);
}

TEST(SpikePattern, Truncate) {
  const SpikePattern t = Truncate(Sample(), 0.1);
  EXPECT_DOUBLE_EQ(t.duration, 0.1);
  EXPECT_EQ(t.TotalSpikes(), 2u);
}

TEST(SpkPat, RoundTrip) {
  std::stringstream ss;
  WriteSpkPat(ss, Sample());
  EXPECT_EQ(ss.str().rfind("SPKPAT v1 3 0.5\n", 0), 0u);
  EXPECT_EQ(ReadSpkPat(ss), Sample());
}

TEST(SpkPat, RejectsMalformed) {
  std::stringstream a("SPKMODEL v1\n");
  EXPECT_THROW(ReadSpkPat(a), DataError);
  std::stringstream b("SPKPAT v2 1 1\n");
  EXPECT_THROW(ReadSpkPat(b), DataError);
  std::stringstream c("SPKPAT v1 2 1\n5 0.1\n");
  EXPECT_THROW(ReadSpkPat(c), DataError);
  std::stringstream d("");
  EXPECT_THROW(ReadSpkPat(d), DataError);
  EXPECT_THROW(LoadSpkPat("/nonexistent/p.spkpat"), DataError);
}

}  // namespace
}  // namespace spikesound
