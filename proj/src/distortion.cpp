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

#include "tilesched/distortion.hpp"

#include <algorithm>
#include <string>

#include "tilesched/error.hpp"

namespace tilesched {

TransmissionSet TransmissionSet::full(int tiles, int frames) {
  FrameSet all(frames);
  for (int f = 0; f < frames; ++f) all[f] = f;
  return TransmissionSet(std::vector<FrameSet>(tiles, all));
}

TransmissionSet TransmissionSet::mandatory(int tiles) {
  return TransmissionSet(std::vector<FrameSet>(tiles, FrameSet{0}));
}

bool TransmissionSet::contains(int tile, int frame) const {
  const FrameSet& s = kept_[tile];
  return std::binary_search(s.begin(), s.end(), frame);
}

std::size_t TransmissionSet::packet_count() const {
  std::size_t total = 0;
  for (const auto& s : kept_) total += s.size();
  return total;
}

void TransmissionSet::validate(int frames, bool require_first) const {
  for (std::size_t t = 0; t < kept_.size(); ++t) {
    const FrameSet& s = kept_[t];
    const std::string where = "tile " + std::to_string(t);
    if (require_first && (s.empty() || s.front() != 0)) {
      throw ValidationError(where + ": frame 0 must be transmitted");
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] < 0 || s[k] >= frames) throw ValidationError(where + ": frame index out of range");
      if (k > 0 && s[k] <= s[k - 1]) {
        throw ValidationError(where + ": kept frames must be sorted and unique");
      }
    }
  }
}

FrameSet dropped_frames(const FrameSet& kept, int frames) {
  FrameSet out;
  out.reserve(frames - std::min<int>(frames, static_cast<int>(kept.size())));
  auto it = kept.begin();
  for (int f = 0; f < frames; ++f) {
    if (it != kept.end() && *it == f) {
      ++it;
    } else {
      out.push_back(f);
    }
  }
  return out;
}

std::vector<int> conceal_partial(const FrameSet& kept, int frames) {
  std::vector<int> ref(frames, kNoReference);
  int current = kNoReference;
  auto it = kept.begin();
  for (int i = 0; i < frames; ++i) {
    if (it != kept.end() && *it == i) {
      current = i;
      ++it;
    }
    ref[i] = current;
  }
  return ref;
}

std::vector<int> conceal(const FrameSet& kept, int frames) {
  if (frames > 0 && (kept.empty() || kept.front() != 0)) {
    throw ValidationError("transmission set must contain frame 0");
  }
  return conceal_partial(kept, frames);
}

namespace {

double frame_cost(const TileView& tile, int eta, int reference) {
  const double shown = reference == kNoReference ? kUnreferencedFrameDistortion
                                                 : tile.distortion.at(eta, reference);
  return shown + tile.stream.packets[eta].propagation_penalty;
}

}  // namespace

std::vector<double> frame_distortions(const TileView& tile, const FrameSet& kept) {
  const int n = tile.frames();
  const std::vector<int> ref = conceal_partial(kept, n);
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (ref[i] != i) out[i] = frame_cost(tile, i, ref[i]);
  }
  return out;
}

double set_distortion_partial(const TileView& tile, const FrameSet& kept) {
  const int n = tile.frames();
  const std::vector<int> ref = conceal_partial(kept, n);
  // Summed in ascending frame order, one dropped packet at a time, so the
  // total matches a sum of packet_distortion() bit for bit.
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (ref[i] != i) total += frame_cost(tile, i, ref[i]);
  }
  return total;
}

double set_distortion(const TileView& tile, const FrameSet& kept) {
  if (tile.frames() > 0 && (kept.empty() || kept.front() != 0)) {
    throw ValidationError("transmission set must contain frame 0");
  }
  return set_distortion_partial(tile, kept);
}

double packet_distortion(const TileView& tile, const FrameSet& kept, int eta) {
  if (eta < 0 || eta >= tile.frames()) throw ValidationError("packet index out of range");
  if (std::binary_search(kept.begin(), kept.end(), eta)) {
    throw ValidationError("packet " + std::to_string(eta) + " is not dropped");
  }
  auto it = std::upper_bound(kept.begin(), kept.end(), eta);
  const int ref = it == kept.begin() ? kNoReference : *std::prev(it);
  return frame_cost(tile, eta, ref);
}

double weighted_distortion(const VideoSegment& video, const TransmissionSet& kept,
                           std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != video.tile_count()) {
    throw ValidationError("expected " + std::to_string(video.tile_count()) + " tile weights, got " +
                          std::to_string(lambda.size()));
  }
  if (kept.tile_count() != video.tile_count()) {
    throw ValidationError("transmission set tile count mismatch");
  }
  double total = 0.0;
  for (int t = 0; t < video.tile_count(); ++t) {
    if (lambda[t] < 0) throw ValidationError("tile weights must be non-negative");
    total += lambda[t] * set_distortion_partial(tile_view(video, t), kept.tile(t));
  }
  return total;
}

std::int64_t transmitted_bytes(const VideoSegment& video, const TransmissionSet& kept) {
  std::int64_t total = 0;
  for (int t = 0; t < kept.tile_count(); ++t) {
    for (int f : kept.tile(t)) total += video.packet(t, f).size_bytes;
  }
  return total;
}

}  // namespace tilesched
