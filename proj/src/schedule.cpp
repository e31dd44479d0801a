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

#include "tilesched/schedule.hpp"

namespace tilesched {

std::vector<PacketRef> Schedule::dropped(const VideoSegment& video) const {
  std::vector<PacketRef> out;
  for (int t = 0; t < kept.tile_count(); ++t) {
    for (int f : dropped_frames(kept.tile(t), video.frames_per_tile)) out.push_back({t, f});
  }
  return out;
}

Schedule make_schedule(const VideoSegment& video, TransmissionSet kept,
                       std::span<const double> lambda) {
  Schedule s;
  s.rate_bytes = transmitted_bytes(video, kept);
  s.weighted_distortion = weighted_distortion(video, kept, lambda);
  s.kept = std::move(kept);
  return s;
}

}  // namespace tilesched
