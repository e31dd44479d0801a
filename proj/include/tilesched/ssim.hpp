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

// Mean SSIM over every 8x8 window (stride 1, uniform weights, population
// moments), K1 = 0.01, K2 = 0.03, L = 255.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tilesched/media.hpp"

namespace tilesched {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

inline constexpr int kSsimWindow = 8;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;
inline constexpr double kSsimDynamicRange = 255.0;

double ssim(const GrayImage& a, const GrayImage& b);

// d[i][j] = max(0, 1 - SSIM(frame_i, frame_j)), d[i][i] = 0.
DistortionMatrix build_distortion_table(std::span<const GrayImage> frames);

// Binary portable graymap (P5, maxval <= 255).
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace tilesched
