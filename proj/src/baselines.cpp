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

#include "tilesched/baselines.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "tilesched/error.hpp"

namespace tilesched {

namespace {

std::vector<bool> check_queue(const VideoSegment& video, std::span<const PacketRef> queue) {
  std::vector<bool> seen(static_cast<std::size_t>(video.tile_count()) * video.frames_per_tile);
  for (const auto& p : queue) {
    if (p.tile < 0 || p.tile >= video.tile_count() || p.frame < 0 ||
        p.frame >= video.frames_per_tile) {
      throw ValidationError("queued packet (" + std::to_string(p.tile) + ", " +
                            std::to_string(p.frame) + ") is outside the segment");
    }
    const std::size_t slot = static_cast<std::size_t>(p.tile) * video.frames_per_tile + p.frame;
    if (seen[slot]) throw ValidationError("packet queued twice");
    seen[slot] = true;
  }
  return seen;
}

Schedule from_mask(const VideoSegment& video, std::span<const PacketRef> queue,
                   const std::vector<bool>& keep) {
  TransmissionSet kept(video.tile_count());
  for (std::size_t k = 0; k < queue.size(); ++k) {
    if (keep[k]) kept.tile(queue[k].tile).push_back(queue[k].frame);
  }
  for (int t = 0; t < video.tile_count(); ++t) std::sort(kept.tile(t).begin(), kept.tile(t).end());
  const std::vector<double> ones(video.tile_count(), 1.0);
  return make_schedule(video, std::move(kept), ones);
}

// Drops packets from the tail of the queue, one priority tier at a time,
// until the rest fits.
Schedule tiered_drop(const VideoSegment& video, std::span<const PacketRef> queue,
                     std::int64_t rate_budget, const std::function<int(FrameType)>& tier) {
  check_queue(video, queue);
  std::vector<bool> keep(queue.size(), true);
  std::int64_t total = 0;
  int top = 0;
  for (const auto& p : queue) {
    total += video.packet(p.tile, p.frame).size_bytes;
    top = std::max(top, tier(video.packet(p.tile, p.frame).type));
  }
  for (int level = 0; level <= top && total > rate_budget; ++level) {
    for (std::size_t k = queue.size(); k-- > 0 && total > rate_budget;) {
      const Packet& p = video.packet(queue[k].tile, queue[k].frame);
      if (tier(p.type) != level) continue;
      keep[k] = false;
      total -= p.size_bytes;
    }
  }
  return from_mask(video, queue, keep);
}

}  // namespace

std::vector<PacketRef> arrival_order(const VideoSegment& video) {
  std::vector<PacketRef> out;
  out.reserve(video.packet_count());
  for (int f = 0; f < video.frames_per_tile; ++f) {
    for (int t = 0; t < video.tile_count(); ++t) out.push_back({t, f});
  }
  return out;
}

Schedule tail_drop(const VideoSegment& video, std::span<const PacketRef> queue,
                   std::int64_t rate_budget) {
  check_queue(video, queue);
  std::vector<bool> keep(queue.size(), false);
  std::int64_t total = 0;
  for (std::size_t k = 0; k < queue.size(); ++k) {
    const std::int64_t size = video.packet(queue[k].tile, queue[k].frame).size_bytes;
    if (total + size > rate_budget) break;
    total += size;
    keep[k] = true;
  }
  return from_mask(video, queue, keep);
}

Schedule ipb_drop(const VideoSegment& video, std::span<const PacketRef> queue,
                  std::int64_t rate_budget) {
  return tiered_drop(video, queue, rate_budget, [](FrameType t) {
    return t == FrameType::B ? 0 : t == FrameType::P ? 1 : 2;
  });
}

Schedule nirap_drop(const VideoSegment& video, std::span<const PacketRef> queue,
                    std::int64_t rate_budget) {
  return tiered_drop(video, queue, rate_budget,
                     [](FrameType t) { return t == FrameType::I ? 1 : 0; });
}

}  // namespace tilesched
