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

#include "tilesched/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tilesched/error.hpp"

namespace tilesched {

namespace {

void check_range(const SizeRange& range, const char* name) {
  if (range.min_bytes <= 0 || range.max_bytes < range.min_bytes) {
    throw ValidationError(std::string("invalid ") + name +
                          " size range: need 0 < min <= max");
  }
}

// Uniform draws from the engine's raw output so the corpus does not depend on
// the standard library's distribution implementations.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::int64_t draw_size(std::mt19937_64& rng, const SizeRange& range, double scale) {
  const double span = static_cast<double>(range.max_bytes - range.min_bytes);
  const double base = static_cast<double>(range.min_bytes) + unit(rng) * span;
  return std::max<std::int64_t>(1, std::llround(base * scale));
}

bool saliency_enabled(const SynthConfig& c) {
  return c.saliency_boost > 0 && c.tiles == c.grid.tile_count();
}

}  // namespace

void validate(const SynthConfig& c) {
  if (c.tiles <= 0) throw ValidationError("tiles must be positive, got " + std::to_string(c.tiles));
  if (c.frames <= 0) {
    throw ValidationError("frames must be positive, got " + std::to_string(c.frames));
  }
  if (c.gop_length <= 0) throw ValidationError("gop_length must be positive");
  if (c.gop_length > c.frames) {
    throw ValidationError("gop_length " + std::to_string(c.gop_length) + " exceeds frames " +
                          std::to_string(c.frames));
  }
  if (c.gop_pattern.empty() && c.gop_length > 1) {
    throw ValidationError("gop_pattern must not be empty");
  }
  for (char ch : c.gop_pattern) {
    if (ch != 'P' && ch != 'B') throw ValidationError("gop_pattern may contain only P and B");
  }
  check_range(c.i_size, "I");
  check_range(c.p_size, "P");
  check_range(c.b_size, "B");
  if (!(c.decay > 0)) throw ValidationError("decay must be positive");
  if (!(c.activity_min > 0 && c.activity_max >= c.activity_min)) {
    throw ValidationError("activity range must satisfy 0 < min <= max");
  }
  if (c.propagation_scale < 0) throw ValidationError("propagation_scale must be >= 0");
  if (c.saliency_boost < 0) throw ValidationError("saliency_boost must be >= 0");
  if (!(c.saliency_width_deg > 0)) throw ValidationError("saliency_width_deg must be positive");
  c.grid.validate();
}

Viewpoint salient_direction(const SynthConfig& config) {
  // Separate stream from the packet draws so the direction stays put when
  // other parameters change.
  std::mt19937_64 rng(config.seed ^ 0x5a17e9cedULL);
  const double yaw = config.salient_yaw.value_or((unit(rng) * 2 - 1) * std::numbers::pi);
  const double pitch = config.salient_pitch.value_or((unit(rng) * 2 - 1) * std::numbers::pi / 12);
  return Viewpoint::from_yaw_pitch(yaw, pitch);
}

VideoSegment synth_video(const SynthConfig& config) {
  validate(config);
  std::mt19937_64 rng(config.seed);
  const int n = config.frames;

  std::vector<double> tile_activity(config.tiles, 1.0);
  if (saliency_enabled(config)) {
    const Viewpoint salient = salient_direction(config);
    const double width = config.saliency_width_deg * std::numbers::pi / 180.0;
    for (int t = 0; t < config.tiles; ++t) {
      const double angle = great_circle_distance(salient, config.grid.tile_center(t));
      tile_activity[t] += config.saliency_boost * std::exp(-0.5 * (angle / width) * (angle / width));
    }
  }

  VideoSegment video;
  video.frames_per_tile = n;
  for (int t = 0; t < config.tiles; ++t) {
    const double size_scale = 1.0 + config.saliency_size_coupling * (tile_activity[t] - 1.0);
    TileStream stream;
    stream.tile_index = t;
    stream.gop_length = config.gop_length;
    std::vector<double> activity(n, 0.0);
    for (int f = 0; f < n; ++f) {
      const int pos = f % config.gop_length;
      FrameType type = FrameType::I;
      if (pos != 0) {
        type = config.gop_pattern[(pos - 1) % config.gop_pattern.size()] == 'P' ? FrameType::P
                                                                                 : FrameType::B;
      }
      const SizeRange& range = type == FrameType::I   ? config.i_size
                               : type == FrameType::P ? config.p_size
                                                      : config.b_size;
      Packet p;
      p.tile = t;
      p.frame = f;
      p.type = type;
      p.size_bytes = draw_size(rng, range, size_scale);
      stream.packets.push_back(p);
      activity[f] = tile_activity[t] *
                    (config.activity_min + unit(rng) * (config.activity_max - config.activity_min));
    }

    // Monotone staleness model: the further back the reference, the larger
    // the accumulated motion it misses.
    DistortionMatrix d(n);
    for (int j = 0; j < n; ++j) {
      double accumulated = 0.0;
      for (int i = j + 1; i < n; ++i) {
        accumulated += activity[i];
        d.set(i, j, -std::expm1(-config.decay * accumulated));
      }
    }

    // An anchor's loss corrupts every later frame of its GOP, each decoded
    // against the frame preceding the anchor.
    for (int f = 0; f < n; ++f) {
      Packet& p = stream.packets[f];
      if (p.type == FrameType::B) continue;
      const int gop_end = std::min(n, (f / config.gop_length + 1) * config.gop_length);
      const int stale = f > 0 ? f - 1 : 0;
      double omega = 0.0;
      for (int k = f + 1; k < gop_end; ++k) omega += d.at(k, stale);
      p.propagation_penalty = config.propagation_scale * omega;
    }

    video.tiles.push_back(std::move(stream));
    video.distortion.push_back(std::move(d));
  }
  return video;
}

}  // namespace tilesched
