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

#include "tilesched/viewport.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "tilesched/error.hpp"

namespace tilesched {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double deg) { return deg * kPi / 180.0; }

}  // namespace

Viewpoint Viewpoint::from_yaw_pitch(double yaw, double pitch) {
  return {std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch)};
}

double Viewpoint::yaw() const { return std::atan2(y, x); }
double Viewpoint::pitch() const { return std::atan2(z, std::hypot(x, y)); }
double Viewpoint::norm() const { return std::sqrt(x * x + y * y + z * z); }
bool Viewpoint::is_unit(double tolerance) const { return std::abs(norm() - 1.0) <= tolerance; }

double great_circle_distance(const Viewpoint& a, const Viewpoint& b) {
  if (!a.is_unit() || !b.is_unit()) throw ValidationError("great-circle distance needs unit vectors");
  const double cx = a.y * b.z - a.z * b.y;
  const double cy = a.z * b.x - a.x * b.z;
  const double cz = a.x * b.y - a.y * b.x;
  const double dot = a.x * b.x + a.y * b.y + a.z * b.z;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

double TileGrid::lat_top(int row) const { return kPi / 2 - row * kPi / rows; }
double TileGrid::lat_bottom(int row) const { return kPi / 2 - (row + 1) * kPi / rows; }
double TileGrid::lon_left(int col) const { return -kPi + col * 2 * kPi / cols; }
double TileGrid::lon_right(int col) const { return -kPi + (col + 1) * 2 * kPi / cols; }

Viewpoint TileGrid::tile_center(int tile) const {
  const int row = tile / cols;
  const int col = tile % cols;
  // Area-weighted center latitude of the band.
  const double s = 0.5 * (std::sin(lat_top(row)) + std::sin(lat_bottom(row)));
  return Viewpoint::from_yaw_pitch(0.5 * (lon_left(col) + lon_right(col)), std::asin(s));
}

void TileGrid::validate() const {
  if (rows <= 0 || cols <= 0) throw ValidationError("tile grid needs positive rows and cols");
}

void ViewportSpec::validate() const {
  // A horizontal field of view up to 360 lets a viewport span the whole sphere.
  if (!(horizontal_fov_deg > 0 && horizontal_fov_deg <= 360)) {
    throw ValidationError("horizontal fov must be in (0, 360]");
  }
  if (!(vertical_fov_deg > 0 && vertical_fov_deg <= 180)) {
    throw ValidationError("vertical fov must be in (0, 180]");
  }
}

namespace {

// Rotates `direction` into the frame where `view` is (1, 0, 0): undo the
// view's yaw about z, then its pitch about y.
struct LocalFrame {
  double cy, sy, cp, sp;
  explicit LocalFrame(const Viewpoint& view) {
    const double yaw = view.yaw();
    const double pitch = view.pitch();
    cy = std::cos(yaw);
    sy = std::sin(yaw);
    cp = std::cos(pitch);
    sp = std::sin(pitch);
  }
  bool inside(double x, double y, double z, double half_h, double half_v) const {
    const double x1 = cy * x + sy * y;
    const double y1 = -sy * x + cy * y;
    const double x2 = cp * x1 + sp * z;
    const double z2 = -sp * x1 + cp * z;
    const double local_yaw = std::atan2(y1, x2);
    const double local_pitch = std::atan2(z2, std::hypot(x2, y1));
    return std::abs(local_yaw) <= half_h && std::abs(local_pitch) <= half_v;
  }
};

}  // namespace

bool in_viewport(const Viewpoint& view, const ViewportSpec& spec, const Viewpoint& direction) {
  const LocalFrame frame(view);
  return frame.inside(direction.x, direction.y, direction.z, deg2rad(spec.horizontal_fov_deg) / 2,
                      deg2rad(spec.vertical_fov_deg) / 2);
}

std::vector<double> tile_overlap(const Viewpoint& view, const TileGrid& grid,
                                 const ViewportSpec& spec, int samples) {
  grid.validate();
  spec.validate();
  if (samples <= 0) throw ValidationError("sample count must be positive");
  const LocalFrame frame(view);
  // A small slack keeps boundary samples of a full-sphere viewport inside.
  const double half_h = deg2rad(spec.horizontal_fov_deg) / 2 + 1e-12;
  const double half_v = deg2rad(spec.vertical_fov_deg) / 2 + 1e-12;

  std::vector<double> lon_cos(samples), lon_sin(samples);
  std::vector<double> out(grid.tile_count(), 0.0);
  for (int row = 0; row < grid.rows; ++row) {
    const double top = grid.lat_top(row);
    const double bottom = grid.lat_bottom(row);
    for (int col = 0; col < grid.cols; ++col) {
      const double left = grid.lon_left(col);
      const double width = grid.lon_right(col) - left;
      for (int k = 0; k < samples; ++k) {
        const double lon = left + (k + 0.5) / samples * width;
        lon_cos[k] = std::cos(lon);
        lon_sin[k] = std::sin(lon);
      }
      double inside = 0.0;
      double total = 0.0;
      for (int r = 0; r < samples; ++r) {
        const double lat = bottom + (r + 0.5) / samples * (top - bottom);
        const double cl = std::cos(lat);
        const double sl = std::sin(lat);
        for (int k = 0; k < samples; ++k) {
          total += cl;
          if (frame.inside(cl * lon_cos[k], cl * lon_sin[k], sl, half_h, half_v)) inside += cl;
        }
      }
      out[row * grid.cols + col] = total > 0 ? inside / total : 0.0;
    }
  }
  return out;
}

int overlap_class(double fraction) {
  if (fraction >= 1.0 - 1e-9) return 4;
  if (fraction >= 0.5) return 3;
  if (fraction > 0.0) return 2;
  return 1;
}

std::vector<int> classify_tiles(const Viewpoint& view, const TileGrid& grid,
                                const ViewportSpec& spec, int samples) {
  const std::vector<double> overlap = tile_overlap(view, grid, spec, samples);
  std::vector<int> classes(overlap.size());
  std::transform(overlap.begin(), overlap.end(), classes.begin(), overlap_class);
  return classes;
}

double tile_weight(double probability, int tile_class) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw ValidationError("probability must lie in [0, 1]");
  }
  if (tile_class < 1 || tile_class > kClassCount) {
    throw ValidationError("tile class must lie in [1, 4], got " + std::to_string(tile_class));
  }
  // p * L / 4 in binary rounds 0.8 * 3 / 4 to 0.6000000000000001. Work on the
  // shortest decimal form of p instead (L / 4 = 25 L / 100) and round once.
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, probability, std::chars_format::scientific);
  std::string text(buf, end);
  const auto e = text.find('e');
  std::string digits = text.substr(0, e);
  std::erase(digits, '.');
  const int exponent = std::stoi(text.substr(e + 1)) - static_cast<int>(digits.size() - 1) - 2;
  const std::uint64_t scaled = std::stoull(digits) * 25u * static_cast<std::uint64_t>(tile_class);
  const std::string product = std::to_string(scaled) + "e" + std::to_string(exponent);
  double weight = 0.0;
  std::from_chars(product.data(), product.data() + product.size(), weight);
  return weight;
}

TileWeights TileWeights::uniform(int tiles, double value) {
  return TileWeights{std::vector<double>(tiles, value), std::vector<int>(tiles, kClassCount)};
}

TileWeights weights_for_prediction(const Viewpoint& view, double probability,
                                   const TileGrid& grid, const ViewportSpec& spec) {
  if (!view.is_unit()) throw ValidationError("predicted viewpoint must be a unit vector");
  TileWeights weights;
  weights.tile_class = classify_tiles(view, grid, spec);
  weights.lambda.reserve(weights.tile_class.size());
  for (int c : weights.tile_class) weights.lambda.push_back(tile_weight(probability, c));
  return weights;
}

}  // namespace tilesched
