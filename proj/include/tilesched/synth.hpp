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
#include <optional>
#include <string>

#include "tilesched/media.hpp"
#include "tilesched/viewport.hpp"

namespace tilesched {

struct SizeRange {
  std::int64_t min_bytes = 1;
  std::int64_t max_bytes = 1;
};

// Parameters of the synthetic corpus generator. Defaults describe a 24-tile,
// 5 s, 25 fps segment of roughly 20 Mbit/s.
struct SynthConfig {
  int tiles = 24;
  int frames = 125;
  int gop_length = 25;
  // Frame types following the I frame of every GOP, repeated cyclically.
  std::string gop_pattern = "BBP";
  SizeRange i_size{16000, 24000};
  SizeRange p_size{4500, 7500};
  SizeRange b_size{1500, 2500};
  std::uint64_t seed = 1;
  // d[i][j] = 1 - exp(-decay * accumulated activity between j and i).
  double decay = 0.05;
  double activity_min = 0.5;
  double activity_max = 1.5;
  double propagation_scale = 1.0;

  // Salient region: tiles near it carry more motion, hence larger concealment
  // distortion. Applied only when tiles == grid.rows * grid.cols.
  TileGrid grid{};
  double saliency_boost = 1.5;
  double saliency_width_deg = 50.0;
  // Radians. When unset the direction is drawn from the seed.
  std::optional<double> salient_yaw;
  std::optional<double> salient_pitch;
  // Fraction of the activity boost that also inflates packet sizes.
  double saliency_size_coupling = 0.0;
};

// Throws ValidationError with a description of the first offending field.
void validate(const SynthConfig& config);

// Deterministic for a fixed config. See SynthConfig for the model.
VideoSegment synth_video(const SynthConfig& config);

// Salient direction used by synth_video for this config.
Viewpoint salient_direction(const SynthConfig& config);

}  // namespace tilesched
