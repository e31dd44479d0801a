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

// Tiled, GOP-structured video model with per-packet rate-distortion metadata.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tilesched {

enum class FrameType : std::uint8_t { I, P, B };

char frame_type_char(FrameType type);
FrameType frame_type_from_char(char c);  // throws ValidationError

// One packet per tile-frame.
struct Packet {
  int tile = 0;
  int frame = 0;
  FrameType type = FrameType::I;
  std::int64_t size_bytes = 0;
  // Extra distortion the loss of this packet propagates into frames that
  // reference it. Zero for B packets.
  double propagation_penalty = 0.0;

  friend bool operator==(const Packet&, const Packet&) = default;
};

// Lower-triangular matrix d[i][j], 0 <= j <= i < n, with d[i][i] == 0.
// d[i][j] is the distortion of showing frame j in place of frame i.
class DistortionMatrix {
 public:
  DistortionMatrix() = default;
  explicit DistortionMatrix(int frames);

  int frames() const { return frames_; }
  double at(int i, int j) const { return values_[index(i, j)]; }
  void set(int i, int j, double value) { values_[index(i, j)] = value; }

  // Rows [begin, end) and the matching columns, rebased to 0.
  DistortionMatrix slice(int begin, int end) const;

  // Throws ValidationError on a non-zero diagonal or a negative/non-finite entry.
  void validate(int tile) const;

  friend bool operator==(const DistortionMatrix&, const DistortionMatrix&) = default;

 private:
  static std::size_t index(int i, int j) {
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
  }

  int frames_ = 0;
  std::vector<double> values_;
};

// Per-tile concealment tables; there are no cross-tile entries.
using DistortionTable = std::vector<DistortionMatrix>;

struct TileStream {
  int tile_index = 0;
  std::vector<Packet> packets;
  int gop_length = 1;

  int frames() const { return static_cast<int>(packets.size()); }
  std::int64_t total_bytes() const;

  friend bool operator==(const TileStream&, const TileStream&) = default;
};

struct VideoSegment {
  std::vector<TileStream> tiles;
  int frames_per_tile = 0;
  DistortionTable distortion;

  int tile_count() const { return static_cast<int>(tiles.size()); }
  int packet_count() const { return tile_count() * frames_per_tile; }
  std::int64_t total_bytes() const;
  const Packet& packet(int tile, int frame) const { return tiles[tile].packets[frame]; }

  // Frames [begin, end) of every tile, frame indices rebased to 0. Propagation
  // penalties are carried over unchanged.
  VideoSegment slice_frames(int begin, int end) const;

  // Checks every TileStream / DistortionMatrix / Packet invariant.
  void validate() const;

  friend bool operator==(const VideoSegment&, const VideoSegment&) = default;
};

// Lightweight read-only pairing of a tile's packets with its table.
struct TileView {
  const TileStream& stream;
  const DistortionMatrix& distortion;

  int frames() const { return stream.frames(); }
};

inline TileView tile_view(const VideoSegment& video, int tile) {
  return TileView{video.tiles[tile], video.distortion[tile]};
}

}  // namespace tilesched
