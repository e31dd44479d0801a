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

// Weight-agnostic drop strategies used for comparison. Each walks an
// arrival-ordered queue; within a priority class the earliest arrival is
// dropped first. None of them protects frame 0.

#include <cstdint>
#include <span>
#include <vector>

#include "tilesched/schedule.hpp"

namespace tilesched {

// Frame-major, tile-minor: every tile's frame 0, then every tile's frame 1, ...
std::vector<PacketRef> arrival_order(const VideoSegment& video);

// Keeps the longest arrival-order prefix that fits.
Schedule tail_drop(const VideoSegment& video, std::span<const PacketRef> queue,
                   std::int64_t rate_budget);

// Drops B packets, then P, then I, until the rest fits.
Schedule ipb_drop(const VideoSegment& video, std::span<const PacketRef> queue,
                  std::int64_t rate_budget);

// Drops non-IRAP (P and B alike) packets before any I packet.
Schedule nirap_drop(const VideoSegment& video, std::span<const PacketRef> queue,
                    std::int64_t rate_budget);

}  // namespace tilesched
