// Copyright 2026 The tilesched Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tilesched/distortion.hpp"
#include "tilesched/media.hpp"

namespace tilesched {

struct PacketRef {
  int tile = 0;
  int frame = 0;
  friend bool operator==(const PacketRef&, const PacketRef&) = default;
};

// Outcome of one scheduling decision over a segment.
struct Schedule {
  TransmissionSet kept;
  std::int64_t rate_bytes = 0;
  // Under the weights the schedule was computed with (uniform for the
  // weight-agnostic baselines). Frames without a transmitted predecessor
  // cost kUnreferencedFrameDistortion.
  double weighted_distortion = 0.0;

  std::vector<PacketRef> dropped(const VideoSegment& video) const;
};

// Fills rate_bytes and weighted_distortion from the distortion engine.
Schedule make_schedule(const VideoSegment& video, TransmissionSet kept,
                       std::span<const double> lambda);

}  // namespace tilesched
