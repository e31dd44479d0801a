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

// Previous-frame concealment and the distortion functionals built on it.
//
// A transmission set keeps, per tile, a sorted list of frame indices. A
// dropped frame i is shown as r(i) = max{s in S : s <= i}. Dropping packet
// eta costs d[eta][r(eta)] + omega(eta); costs add over dropped packets.

#include <cstdint>
#include <span>
#include <vector>

#include "tilesched/media.hpp"
#include "tilesched/viewport.hpp"

namespace tilesched {

// Sorted, duplicate-free kept frame indices.
using FrameSet = std::vector<int>;

class TransmissionSet {
 public:
  TransmissionSet() = default;
  explicit TransmissionSet(int tiles) : kept_(tiles) {}
  explicit TransmissionSet(std::vector<FrameSet> kept) : kept_(std::move(kept)) {}

  static TransmissionSet full(int tiles, int frames);
  // Frame 0 of every tile.
  static TransmissionSet mandatory(int tiles);

  int tile_count() const { return static_cast<int>(kept_.size()); }
  const FrameSet& tile(int t) const { return kept_[t]; }
  FrameSet& tile(int t) { return kept_[t]; }
  bool contains(int tile, int frame) const;
  std::size_t packet_count() const;

  // Sorted, unique, within [0, frames). With require_first, 0 must be kept.
  void validate(int frames, bool require_first = true) const;

  friend bool operator==(const TransmissionSet&, const TransmissionSet&) = default;

 private:
  std::vector<FrameSet> kept_;
};

// Complement of `kept` within [0, frames).
FrameSet dropped_frames(const FrameSet& kept, int frames);

// Reference map of previous-frame concealment. Requires 0 in `kept`.
std::vector<int> conceal(const FrameSet& kept, int frames);

// Same as conceal() but tolerates a missing frame 0: frames before the first
// kept frame map to kNoReference.
inline constexpr int kNoReference = -1;
std::vector<int> conceal_partial(const FrameSet& kept, int frames);

// Distortion charged to a frame that has no earlier transmitted frame to be
// concealed with (1 - SSIM against a blank frame, taken as 1).
inline constexpr double kUnreferencedFrameDistortion = 1.0;

// D(K) for one tile. Requires 0 in `kept`.
double set_distortion(const TileView& tile, const FrameSet& kept);

// D(K) when frame 0 may be missing; unreferenced frames cost
// kUnreferencedFrameDistortion each on top of their propagation penalty.
double set_distortion_partial(const TileView& tile, const FrameSet& kept);

// D(p_eta) = d[eta][r(eta)] + omega(eta). Throws ValidationError if eta is kept.
double packet_distortion(const TileView& tile, const FrameSet& kept, int eta);

// Per-frame contribution: 0 for kept frames, D(p_eta) for dropped ones.
// Tolerates a missing frame 0 like set_distortion_partial.
std::vector<double> frame_distortions(const TileView& tile, const FrameSet& kept);

// Sum over tiles of lambda_tau * D(K^tau).
double weighted_distortion(const VideoSegment& video, const TransmissionSet& kept,
                           std::span<const double> lambda);

std::int64_t transmitted_bytes(const VideoSegment& video, const TransmissionSet& kept);

}  // namespace tilesched
