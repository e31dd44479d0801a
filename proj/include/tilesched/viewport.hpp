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

// Viewpoints on the unit sphere and viewport-overlap tile weighting.
//
// Coordinates: yaw (longitude) in [-pi, pi), pitch (latitude) in
// [-pi/2, pi/2]; x = cos(pitch) cos(yaw), y = cos(pitch) sin(yaw),
// z = sin(pitch).

#include <vector>

namespace tilesched {

struct Viewpoint {
  double x = 1.0;
  double y = 0.0;
  double z = 0.0;

  static Viewpoint from_yaw_pitch(double yaw, double pitch);
  double yaw() const;
  double pitch() const;
  double norm() const;
  bool is_unit(double tolerance = 1e-9) const;

  friend bool operator==(const Viewpoint&, const Viewpoint&) = default;
};

// Arc length in [0, pi]. Throws ValidationError for non-unit input.
double great_circle_distance(const Viewpoint& a, const Viewpoint& b);

// Equirectangular tiling; tile index = row * cols + col, row 0 at the north
// pole, col 0 starting at yaw -pi.
struct TileGrid {
  int rows = 4;
  int cols = 6;

  int tile_count() const { return rows * cols; }
  double lat_top(int row) const;     // radians
  double lat_bottom(int row) const;  // radians
  double lon_left(int col) const;    // radians
  double lon_right(int col) const;   // radians
  Viewpoint tile_center(int tile) const;
  void validate() const;
};

struct ViewportSpec {
  double horizontal_fov_deg = 120.0;
  double vertical_fov_deg = 120.0;
  void validate() const;
};

// True when `direction` lies within +-fov/2 of `view` in the viewer's local
// yaw and pitch.
bool in_viewport(const Viewpoint& view, const ViewportSpec& spec, const Viewpoint& direction);

// Area-weighted fraction of each tile covered by the viewport, estimated on
// a samples x samples grid of cell centers per tile.
std::vector<double> tile_overlap(const Viewpoint& view, const TileGrid& grid,
                                 const ViewportSpec& spec, int samples = 64);

// 4: fully inside, 3: at least half, 2: partially, 1: outside.
int overlap_class(double fraction);

std::vector<int> classify_tiles(const Viewpoint& view, const TileGrid& grid,
                                const ViewportSpec& spec, int samples = 64);

inline constexpr int kClassCount = 4;

// lambda = E * L / M with M = 4.
double tile_weight(double probability, int tile_class);

struct TileWeights {
  std::vector<double> lambda;
  std::vector<int> tile_class;

  static TileWeights uniform(int tiles, double value = 1.0);
  int size() const { return static_cast<int>(lambda.size()); }
};

TileWeights weights_for_prediction(const Viewpoint& view, double probability,
                                   const TileGrid& grid, const ViewportSpec& spec);

}  // namespace tilesched
