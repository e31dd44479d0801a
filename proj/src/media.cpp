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

#include "tilesched/media.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tilesched/error.hpp"

namespace tilesched {

char frame_type_char(FrameType type) {
  switch (type) {
    case FrameType::I: return 'I';
    case FrameType::P: return 'P';
    case FrameType::B: return 'B';
  }
  return '?';
}

FrameType frame_type_from_char(char c) {
  switch (c) {
    case 'I': return FrameType::I;
    case 'P': return FrameType::P;
    case 'B': return FrameType::B;
    default: throw ValidationError(std::string("unknown frame type '") + c + "'");
  }
}

DistortionMatrix::DistortionMatrix(int frames)
    : frames_(frames), values_(static_cast<std::size_t>(frames) * (frames + 1) / 2, 0.0) {
  if (frames < 0) throw ValidationError("negative frame count");
}

DistortionMatrix DistortionMatrix::slice(int begin, int end) const {
  if (begin < 0 || end > frames_ || begin > end) {
    throw ValidationError("distortion slice out of range");
  }
  DistortionMatrix out(end - begin);
  for (int i = begin; i < end; ++i) {
    for (int j = begin; j <= i; ++j) out.set(i - begin, j - begin, at(i, j));
  }
  return out;
}

void DistortionMatrix::validate(int tile) const {
  for (int i = 0; i < frames_; ++i) {
    if (at(i, i) != 0.0) {
      throw ValidationError("tile " + std::to_string(tile) + ": d[" + std::to_string(i) + "][" +
                            std::to_string(i) + "] must be 0");
    }
    for (int j = 0; j < i; ++j) {
      const double v = at(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("tile " + std::to_string(tile) + ": d[" + std::to_string(i) +
                              "][" + std::to_string(j) + "] must be finite and >= 0");
      }
    }
  }
}

std::int64_t TileStream::total_bytes() const {
  return std::accumulate(packets.begin(), packets.end(), std::int64_t{0},
                         [](std::int64_t acc, const Packet& p) { return acc + p.size_bytes; });
}

std::int64_t VideoSegment::total_bytes() const {
  std::int64_t total = 0;
  for (const auto& tile : tiles) total += tile.total_bytes();
  return total;
}

VideoSegment VideoSegment::slice_frames(int begin, int end) const {
  if (begin < 0 || end > frames_per_tile || begin >= end) {
    throw ValidationError("frame slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") out of range");
  }
  VideoSegment out;
  out.frames_per_tile = end - begin;
  out.tiles.reserve(tiles.size());
  out.distortion.reserve(tiles.size());
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    TileStream stream;
    stream.tile_index = tiles[t].tile_index;
    stream.gop_length = tiles[t].gop_length;
    for (int f = begin; f < end; ++f) {
      Packet p = tiles[t].packets[f];
      p.frame = f - begin;
      stream.packets.push_back(p);
    }
    out.tiles.push_back(std::move(stream));
    out.distortion.push_back(distortion[t].slice(begin, end));
  }
  return out;
}

void VideoSegment::validate() const {
  if (frames_per_tile <= 0) throw ValidationError("segment has no frames");
  if (tiles.empty()) throw ValidationError("segment has no tiles");
  if (distortion.size() != tiles.size()) {
    throw ValidationError("distortion table count does not match tile count");
  }
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const TileStream& stream = tiles[t];
    const std::string where = "tile " + std::to_string(t);
    if (stream.tile_index != static_cast<int>(t)) {
      throw ValidationError(where + ": tile_index " + std::to_string(stream.tile_index));
    }
    if (stream.frames() != frames_per_tile) {
      throw ValidationError(where + ": expected " + std::to_string(frames_per_tile) + " frames");
    }
    if (stream.gop_length <= 0) throw ValidationError(where + ": gop_length must be positive");
    if (stream.packets.front().type != FrameType::I) {
      throw ValidationError(where + ": first frame must be an I frame");
    }
    for (int f = 0; f < stream.frames(); ++f) {
      const Packet& p = stream.packets[f];
      const std::string pw = where + " frame " + std::to_string(f);
      if (p.tile != static_cast<int>(t) || p.frame != f) {
        throw ValidationError(pw + ": packet indices out of order");
      }
      if (p.size_bytes <= 0) throw ValidationError(pw + ": size must be positive");
      if (!std::isfinite(p.propagation_penalty) || p.propagation_penalty < 0.0) {
        throw ValidationError(pw + ": propagation penalty must be finite and >= 0");
      }
      if ((f % stream.gop_length == 0) != (p.type == FrameType::I)) {
        throw ValidationError(pw + ": I frames must open every GOP and only there");
      }
      if (p.type == FrameType::B && p.propagation_penalty != 0.0) {
        throw ValidationError(pw + ": B packets carry no propagation penalty");
      }
    }
    if (distortion[t].frames() != frames_per_tile) {
      throw ValidationError(where + ": distortion table size mismatch");
    }
    distortion[t].validate(static_cast<int>(t));
  }
}

}  // namespace tilesched
