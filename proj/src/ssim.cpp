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

#include "tilesched/ssim.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include "tilesched/error.hpp"

namespace tilesched {

namespace {

// Inclusive-prefix sums with a zero border: at(x, y) = sum over [0, x) x [0, y).
class SummedArea {
 public:
  template <typename F>
  SummedArea(int width, int height, F value)
      : stride_(width + 1), sums_(static_cast<std::size_t>(width + 1) * (height + 1), 0) {
    for (int y = 0; y < height; ++y) {
      std::int64_t row = 0;
      for (int x = 0; x < width; ++x) {
        row += value(x, y);
        sums_[idx(x + 1, y + 1)] = sums_[idx(x + 1, y)] + row;
      }
    }
  }
  std::int64_t box(int x, int y, int w, int h) const {
    return sums_[idx(x + w, y + h)] - sums_[idx(x, y + h)] - sums_[idx(x + w, y)] + sums_[idx(x, y)];
  }

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * stride_ + x; }
  int stride_;
  std::vector<std::int64_t> sums_;
};

}  // namespace

double ssim(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ValidationError("SSIM needs images of equal dimensions");
  }
  if (a.width < kSsimWindow || a.height < kSsimWindow) {
    throw ValidationError("SSIM needs images of at least 8x8 pixels");
  }
  const int w = a.width;
  const int h = a.height;
  const SummedArea sa(w, h, [&](int x, int y) { return std::int64_t{a.at(x, y)}; });
  const SummedArea sb(w, h, [&](int x, int y) { return std::int64_t{b.at(x, y)}; });
  const SummedArea saa(w, h, [&](int x, int y) { return std::int64_t{a.at(x, y)} * a.at(x, y); });
  const SummedArea sbb(w, h, [&](int x, int y) { return std::int64_t{b.at(x, y)} * b.at(x, y); });
  const SummedArea sab(w, h, [&](int x, int y) { return std::int64_t{a.at(x, y)} * b.at(x, y); });

  const double c1 = (kSsimK1 * kSsimDynamicRange) * (kSsimK1 * kSsimDynamicRange);
  const double c2 = (kSsimK2 * kSsimDynamicRange) * (kSsimK2 * kSsimDynamicRange);
  const double count = kSsimWindow * kSsimWindow;

  double total = 0.0;
  for (int y = 0; y + kSsimWindow <= h; ++y) {
    for (int x = 0; x + kSsimWindow <= w; ++x) {
      const double mu_a = sa.box(x, y, kSsimWindow, kSsimWindow) / count;
      const double mu_b = sb.box(x, y, kSsimWindow, kSsimWindow) / count;
      const double var_a = saa.box(x, y, kSsimWindow, kSsimWindow) / count - mu_a * mu_a;
      const double var_b = sbb.box(x, y, kSsimWindow, kSsimWindow) / count - mu_b * mu_b;
      const double cov = sab.box(x, y, kSsimWindow, kSsimWindow) / count - mu_a * mu_b;
      total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
  }
  const double windows = static_cast<double>(w - kSsimWindow + 1) * (h - kSsimWindow + 1);
  return total / windows;
}

DistortionMatrix build_distortion_table(std::span<const GrayImage> frames) {
  for (const auto& f : frames) {
    if (f.width != frames.front().width || f.height != frames.front().height) {
      throw ValidationError("all frames of a tile must share dimensions");
    }
  }
  const int n = static_cast<int>(frames.size());
  DistortionMatrix d(n);
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j) d.set(i, j, std::max(0.0, 1.0 - ssim(frames[i], frames[j])));
  }
  return d;
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  if (pgm_token(in) != "P5") throw ParseError(path.string() + ": not a binary PGM (P5)", 0);
  GrayImage image;
  int maxval = 0;
  try {
    image.width = std::stoi(pgm_token(in));
    image.height = std::stoi(pgm_token(in));
    maxval = std::stoi(pgm_token(in));
  } catch (const std::exception&) {
    throw ParseError(path.string() + ": malformed PGM header", 0);
  }
  if (image.width <= 0 || image.height <= 0 || maxval <= 0 || maxval > 255) {
    throw ParseError(path.string() + ": unsupported PGM dimensions or maxval", 0);
  }
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.pixels.size())) {
    throw ParseError(path.string() + ": truncated PGM raster", 0);
  }
  return image;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

}  // namespace tilesched
