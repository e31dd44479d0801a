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

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "tilesched/error.hpp"
#include "tilesched/segment_io.hpp"
#include "tilesched/ssim.hpp"
#include "tilesched/synth.hpp"

using namespace tilesched;

namespace {

SynthConfig small_config(int tiles, int frames, std::uint64_t seed) {
  SynthConfig c;
  c.tiles = tiles;
  c.frames = frames;
  c.gop_length = std::min(frames, 8);
  c.seed = seed;
  return c;
}

std::string dump(const VideoSegment& v) {
  std::ostringstream out;
  write_segment(v, out);
  return out.str();
}

GrayImage random_image(std::mt19937_64& rng, int w, int h) {
  GrayImage img{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h)};
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

}  // namespace

TEST(Synth, SingleFrameSegment) {
  SynthConfig c = small_config(1, 1, 1);
  c.gop_length = 1;
  const VideoSegment v = synth_video(c);
  ASSERT_EQ(v.tile_count(), 1);
  ASSERT_EQ(v.frames_per_tile, 1);
  EXPECT_EQ(v.packet(0, 0).type, FrameType::I);
  EXPECT_EQ(v.distortion[0].frames(), 1);
  EXPECT_EQ(v.distortion[0].at(0, 0), 0.0);
}

TEST(Synth, DeterministicForFixedSeed) {
  SynthConfig c;
  c.seed = 7;
  const VideoSegment a = synth_video(c);
  const VideoSegment b = synth_video(c);
  EXPECT_EQ(a, b);
  EXPECT_EQ(dump(a), dump(b));
  c.seed = 8;
  EXPECT_NE(dump(a), dump(synth_video(c)));
}

TEST(Synth, BPacketsCarryNoPenalty) {
  const VideoSegment v = synth_video(small_config(2, 8, 3));
  int b_count = 0;
  for (const auto& tile : v.tiles) {
    for (const auto& p : tile.packets) {
      if (p.type != FrameType::B) continue;
      ++b_count;
      EXPECT_EQ(p.propagation_penalty, 0.0);
    }
  }
  EXPECT_GT(b_count, 0);
}

TEST(Synth, StructuralProperties) {
  SynthConfig c;
  c.seed = 11;
  const VideoSegment v = synth_video(c);
  ASSERT_NO_THROW(v.validate());
  double sums[3] = {0, 0, 0};
  int counts[3] = {0, 0, 0};
  for (int t = 0; t < v.tile_count(); ++t) {
    const auto& tile = v.tiles[t];
    EXPECT_EQ(tile.packets.front().type, FrameType::I);
    for (int f = 0; f < v.frames_per_tile; ++f) {
      const auto& p = tile.packets[f];
      EXPECT_EQ(p.type == FrameType::I, f % c.gop_length == 0) << "tile " << t << " frame " << f;
      sums[static_cast<int>(p.type)] += static_cast<double>(p.size_bytes);
      ++counts[static_cast<int>(p.type)];
    }
    // d[i][j] grows with i - j inside a GOP.
    const auto& d = v.distortion[t];
    for (int g = 0; g < v.frames_per_tile; g += c.gop_length) {
      const int end = std::min(v.frames_per_tile, g + c.gop_length);
      for (int j = g; j < end; ++j) {
        for (int i = j + 1; i < end; ++i) {
          EXPECT_GT(d.at(i, j), i > j + 1 ? d.at(i - 1, j) : 0.0);
        }
      }
    }
  }
  const double mean_i = sums[0] / counts[0], mean_p = sums[1] / counts[1], mean_b = sums[2] / counts[2];
  EXPECT_GT(mean_i, mean_p);
  EXPECT_GT(mean_p, mean_b);
}

TEST(Synth, RejectsInvalidConfig) {
  SynthConfig c;
  c.tiles = 0;
  EXPECT_THROW(synth_video(c), ValidationError);
  c = SynthConfig{};
  c.frames = 0;
  EXPECT_THROW(synth_video(c), ValidationError);
  c = SynthConfig{};
  c.frames = 10;
  c.gop_length = 11;
  EXPECT_THROW(synth_video(c), ValidationError);
}

TEST(Synth, TileBytesSumToSegmentTotal) {
  const VideoSegment v = synth_video(small_config(3, 17, 5));
  std::int64_t total = 0;
  for (const auto& tile : v.tiles) {
    std::int64_t own = 0;
    for (const auto& p : tile.packets) own += p.size_bytes;
    EXPECT_EQ(own, tile.total_bytes());
    total += own;
  }
  EXPECT_EQ(total, v.total_bytes());
}

TEST(SegmentIo, RoundTrip) {
  const VideoSegment v = synth_video(small_config(2, 8, 3));
  std::istringstream in(dump(v));
  EXPECT_EQ(read_segment(in), v);

  const auto path = std::filesystem::temp_directory_path() / "tilesched_roundtrip.txt";
  save_segment(v, path);
  EXPECT_EQ(load_segment(path), v);
  std::filesystem::remove(path);
}

TEST(SegmentIo, RoundTripRandomSegments) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 20; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {1 + k % 3, 1 + k % 7});
    std::istringstream in(dump(v));
    EXPECT_EQ(read_segment(in), v);
  }
}

TEST(SegmentIo, TruncatedFileIsParseError) {
  std::string text = dump(synth_video(small_config(2, 8, 3)));
  text.resize(text.size() / 2);
  text.erase(text.rfind('\n'));
  std::istringstream in(text);
  EXPECT_THROW(read_segment(in), ParseError);
}

TEST(SegmentIo, NonZeroDiagonalIsValidationError) {
  std::istringstream in("tiles 1 frames 2\n0 0 I 10 0\n0 1 B 5 0\n0 1 0 0.25\n0 1 1 0.5\n");
  EXPECT_THROW(read_segment(in), ValidationError);
}

TEST(SegmentIo, ParseErrorsNameTheLine) {
  std::istringstream bad_type("tiles 1 frames 1\n0 0 X 10 0\n");
  try {
    read_segment(bad_type);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream dup("tiles 1 frames 1\n0 0 I 10 0\n0 0 I 10 0\n");
  EXPECT_THROW(read_segment(dup), ParseError);
  std::istringstream no_header("0 0 I 10 0\n");
  EXPECT_THROW(read_segment(no_header), ParseError);
  std::istringstream bad_size("tiles 1 frames 1\n0 0 I ten 0\n");
  EXPECT_THROW(read_segment(bad_size), ParseError);
}

TEST(SegmentIo, HeaderWithoutGopTreatsSegmentAsOneGop) {
  std::istringstream in("# comment\ntiles 1 frames 2\n0 0 I 10 0.5\n0 1 P 5 0  # trailing\n0 1 0 0.25\n");
  const VideoSegment v = read_segment(in);
  EXPECT_EQ(v.tiles[0].gop_length, 2);
  EXPECT_EQ(v.distortion[0].at(1, 0), 0.25);
  EXPECT_EQ(v.packet(0, 0).propagation_penalty, 0.5);
}

TEST(SegmentIo, InvariantViolationsRejected) {
  // B frame with a penalty.
  std::istringstream b_omega("tiles 1 frames 2\n0 0 I 10 0\n0 1 B 5 0.1\n0 1 0 0.25\n");
  EXPECT_THROW(read_segment(b_omega), ValidationError);
  // Zero-size packet.
  std::istringstream zero("tiles 1 frames 1\n0 0 I 0 0\n");
  EXPECT_THROW(read_segment(zero), ValidationError);
  // Stream that does not start with I.
  std::istringstream p_first("tiles 1 frames 1\n0 0 P 3 0\n");
  EXPECT_THROW(read_segment(p_first), ValidationError);
}

TEST(SegmentIo, SliceRebasesFrames) {
  const VideoSegment v = synth_video(small_config(2, 16, 9));
  const VideoSegment s = v.slice_frames(8, 16);
  ASSERT_EQ(s.frames_per_tile, 8);
  for (int t = 0; t < 2; ++t) {
    for (int f = 0; f < 8; ++f) {
      EXPECT_EQ(s.packet(t, f).frame, f);
      EXPECT_EQ(s.packet(t, f).size_bytes, v.packet(t, f + 8).size_bytes);
      for (int j = 0; j <= f; ++j) EXPECT_EQ(s.distortion[t].at(f, j), v.distortion[t].at(f + 8, j + 8));
    }
  }
  EXPECT_THROW(v.slice_frames(4, 4), ValidationError);
}

TEST(Ssim, IdenticalImagesGiveZeroDistortion) {
  std::mt19937_64 rng(1);
  const GrayImage img = random_image(rng, 32, 24);
  EXPECT_DOUBLE_EQ(ssim(img, img), 1.0);
  const std::vector<GrayImage> frames(4, img);
  const DistortionMatrix d = build_distortion_table(frames);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) EXPECT_EQ(d.at(i, j), 0.0);
  }
}

TEST(Ssim, MatchesWindowedOracle) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const int w = 8 + static_cast<int>(rng() % 24), h = 8 + static_cast<int>(rng() % 24);
    GrayImage a = random_image(rng, w, h);
    GrayImage b = a;
    for (auto& p : b.pixels) p = static_cast<std::uint8_t>(std::clamp<int>(p + static_cast<int>(rng() % 61) - 30, 0, 255));
    EXPECT_NEAR(ssim(a, b), oracle::ssim(a, b), 1e-9);
  }
}

TEST(Ssim, InvertedFrameIsFarAway) {
  GrayImage a{32, 32, std::vector<std::uint8_t>(32 * 32)};
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) a.pixels[y * 32 + x] = static_cast<std::uint8_t>((x * 7 + y * 13) % 256);
  }
  GrayImage inv = a;
  for (auto& p : inv.pixels) p = static_cast<std::uint8_t>(255 - p);
  const std::vector<GrayImage> frames = {a, inv};
  const DistortionMatrix d = build_distortion_table(frames);
  EXPECT_GT(d.at(1, 0), 0.9);
  EXPECT_NEAR(d.at(1, 0), std::max(0.0, 1.0 - oracle::ssim(inv, a)), 1e-9);
}

TEST(Ssim, SingleFrameAndMismatchedDimensions) {
  std::mt19937_64 rng(3);
  const std::vector<GrayImage> one = {random_image(rng, 8, 8)};
  const DistortionMatrix d = build_distortion_table(one);
  EXPECT_EQ(d.frames(), 1);
  EXPECT_EQ(d.at(0, 0), 0.0);
  const std::vector<GrayImage> mixed = {random_image(rng, 8, 8), random_image(rng, 9, 8)};
  EXPECT_THROW(build_distortion_table(mixed), ValidationError);
}

TEST(Ssim, PgmRoundTrip) {
  std::mt19937_64 rng(4);
  const GrayImage img = random_image(rng, 13, 9);
  const auto path = std::filesystem::temp_directory_path() / "tilesched_test.pgm";
  write_pgm(img, path);
  const GrayImage back = read_pgm(path);
  EXPECT_EQ(back.width, 13);
  EXPECT_EQ(back.height, 9);
  EXPECT_EQ(back.pixels, img.pixels);
  std::filesystem::remove(path);
}
