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

#include <random>
#include <string>

#include "oracles.hpp"
#include "tilesched/baselines.hpp"
#include "tilesched/error.hpp"
#include "tilesched/scheduler.hpp"
#include "tilesched/synth.hpp"

using namespace tilesched;

namespace {

std::int64_t mandatory(const VideoSegment& v) {
  std::int64_t m = 0;
  for (const auto& t : v.tiles) m += t.packets.front().size_bytes;
  return m;
}

std::int64_t random_budget(std::mt19937_64& rng, const VideoSegment& v) {
  const std::int64_t lo = mandatory(v);
  return lo + static_cast<std::int64_t>(rng() % (v.total_bytes() - lo + 1));
}

std::vector<double> random_weights(std::mt19937_64& rng, int tiles) {
  std::vector<double> w(tiles);
  for (auto& x : w) x = tile_weight(0.5 + 0.5 * static_cast<double>(rng() % 3) / 2, 1 + static_cast<int>(rng() % 4));
  return w;
}

void expect_valid(const VideoSegment& v, const Schedule& s, std::int64_t budget) {
  EXPECT_LE(s.rate_bytes, budget);
  EXPECT_EQ(s.rate_bytes, transmitted_bytes(v, s.kept));
  EXPECT_NO_THROW(s.kept.validate(v.frames_per_tile));
  EXPECT_EQ(s.kept.packet_count() + s.dropped(v).size(), static_cast<std::size_t>(v.packet_count()));
}

VideoSegment twin_tiles(std::mt19937_64& rng, int frames) {
  VideoSegment v = oracle::random_segment(rng, {1, frames});
  v.tiles.push_back(v.tiles[0]);
  v.tiles[1].tile_index = 1;
  for (auto& p : v.tiles[1].packets) p.tile = 1;
  v.distortion.push_back(v.distortion[0]);
  return v;
}

}  // namespace

TEST(Allocate, EverythingFitsKeepsEverything) {
  std::mt19937_64 rng(1);
  const VideoSegment v = oracle::random_segment(rng, {3, 6});
  const std::vector<double> w = {1.0, 0.5, 0.25};
  const Schedule s = schedule(v, w, v.total_bytes());
  EXPECT_EQ(s.kept, TransmissionSet::full(3, 6));
  EXPECT_EQ(s.weighted_distortion, 0.0);
}

TEST(Allocate, ZeroWeightTileGetsNothingSpare) {
  std::mt19937_64 rng(2);
  const VideoSegment v = twin_tiles(rng, 6);
  const std::int64_t budget = v.tiles[0].total_bytes() + v.packet(1, 0).size_bytes;
  const Schedule s = schedule(v, std::vector<double>{1.0, 0.0}, budget, {{}, {1}});
  EXPECT_EQ(s.kept.tile(0), TransmissionSet::full(1, 6).tile(0));
  EXPECT_EQ(s.kept.tile(1), (FrameSet{0}));
}

TEST(Allocate, InfeasibleMandatorySetListsTiles) {
  std::mt19937_64 rng(3);
  const VideoSegment v = oracle::random_segment(rng, {2, 4});
  try {
    schedule(v, std::vector<double>{1, 1}, mandatory(v) - 1);
    FAIL() << "expected infeasibility";
  } catch (const InfeasibleError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("0 (" + std::to_string(v.packet(0, 0).size_bytes) + ")"), std::string::npos);
    EXPECT_NE(msg.find("1 (" + std::to_string(v.packet(1, 0).size_bytes) + ")"), std::string::npos);
  }
}

TEST(Allocate, ExactQuantumMatchesJointBruteForce) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 40; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {1 + k % 3, 1 + static_cast<int>(rng() % 5), 1, 300});
    const std::vector<double> w = random_weights(rng, v.tile_count());
    const std::int64_t budget = random_budget(rng, v);
    const Schedule s = schedule(v, w, budget, {{}, {1}});
    const oracle::Best best = oracle::best_joint(v, w, budget);
    expect_valid(v, s, budget);
    EXPECT_NEAR(s.weighted_distortion, best.cost, 1e-9) << "instance " << k;
  }
}

TEST(Allocate, DefaultQuantumWithinOneQuantumPerTile) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 40; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {1 + k % 3, 1 + static_cast<int>(rng() % 6)});
    const std::vector<double> w = random_weights(rng, v.tile_count());
    const std::int64_t budget = random_budget(rng, v);
    const Schedule s = schedule(v, w, budget);
    expect_valid(v, s, budget);
    const oracle::Best best = oracle::best_joint(v, w, budget);
    EXPECT_GE(s.weighted_distortion, best.cost - 1e-9);
    // As good as the exact optimum with one quantum per tile less to spend.
    const std::int64_t reduced = budget - 188 * v.tile_count();
    if (reduced >= mandatory(v)) {
      EXPECT_LE(s.weighted_distortion, oracle::best_joint(v, w, reduced).cost + 1e-9);
    }
  }
}

TEST(Schedule, BruteForceOracleAgreesWithItself) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {2, 5});
    const std::vector<double> w = random_weights(rng, 2);
    const std::int64_t budget = random_budget(rng, v);
    const Schedule s = brute_force_schedule(v, w, budget);
    expect_valid(v, s, budget);
    EXPECT_NEAR(s.weighted_distortion, oracle::best_joint(v, w, budget).cost, 1e-12);
  }
  const VideoSegment big = oracle::random_segment(rng, {3, 8});
  EXPECT_THROW(brute_force_schedule(big, std::vector<double>(3, 1.0), big.total_bytes()), ValidationError);
  const VideoSegment small = oracle::random_segment(rng, {2, 3});
  EXPECT_THROW(brute_force_schedule(small, std::vector<double>(2, 1.0), 0), InfeasibleError);
}

TEST(Schedule, UniformWeightsEqualEwrdExactly) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 25; ++k) {
    SynthConfig c;
    c.tiles = 4;
    c.frames = 12;
    c.gop_length = 12;
    c.seed = rng();
    const VideoSegment v = synth_video(c);
    const std::int64_t budget = random_budget(rng, v);
    const Schedule e = ewrd_schedule(v, budget);
    EXPECT_EQ(schedule(v, std::vector<double>(4, 1.0), budget).kept, e.kept);
    // Any constant weight normalizes to the same problem.
    const Schedule half = schedule(v, std::vector<double>(4, 0.5), budget);
    EXPECT_EQ(half.kept, e.kept);
    EXPECT_EQ(half.rate_bytes, e.rate_bytes);
  }
}

TEST(Schedule, DistortionNonIncreasingInBudget) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {3, 8});
    const std::vector<double> w = random_weights(rng, 3);
    double prev = std::numeric_limits<double>::infinity();
    for (std::int64_t b = mandatory(v); b <= v.total_bytes(); b += 97) {
      const Schedule s = schedule(v, w, b);
      EXPECT_LE(s.weighted_distortion, prev + 1e-12);
      prev = s.weighted_distortion;
    }
  }
}

TEST(Schedule, RaisingATileWeightNeverRaisesItsDistortion) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {3, 7});
    std::vector<double> w = random_weights(rng, 3);
    const std::int64_t budget = random_budget(rng, v);
    const int t = k % 3;
    const double before = set_distortion(tile_view(v, t), schedule(v, w, budget).kept.tile(t));
    w[t] *= 2.0;
    const double after = set_distortion(tile_view(v, t), schedule(v, w, budget).kept.tile(t));
    EXPECT_LE(after, before + 1e-9) << "instance " << k;
  }
}

TEST(Schedule, ViewportTilesGetMoreBytesThanEqualWeighting) {
  SynthConfig c;
  c.seed = 3;
  c.frames = 25;
  const VideoSegment v = synth_video(c);
  const TileWeights w = weights_for_prediction(salient_direction(c), 0.8, TileGrid{}, ViewportSpec{});
  // One window of a 0.5 Mbps link would not even hold the I frames; give it
  // the I frames plus that window's worth.
  const std::int64_t budget = mandatory(v) + 62500;
  const Schedule t = schedule(v, w.lambda, budget);
  const Schedule e = ewrd_schedule(v, budget);
  std::int64_t tv = 0, ev = 0;
  for (int tile = 0; tile < v.tile_count(); ++tile) {
    if (w.tile_class[tile] < 3) continue;
    for (int f : t.kept.tile(tile)) tv += v.packet(tile, f).size_bytes;
    for (int f : e.kept.tile(tile)) ev += v.packet(tile, f).size_bytes;
  }
  EXPECT_GT(tv, ev);
}

TEST(Schedule, RejectsBadWeights) {
  std::mt19937_64 rng(10);
  const VideoSegment v = oracle::random_segment(rng, {2, 4});
  EXPECT_THROW(schedule(v, std::vector<double>{1.0}, v.total_bytes()), ValidationError);
  EXPECT_THROW(schedule(v, std::vector<double>{1.0, -0.5}, v.total_bytes()), ValidationError);
}

TEST(Fallback, DropsWholeTilesWhenFrameZeroDoesNotFit) {
  std::mt19937_64 rng(11);
  const VideoSegment v = oracle::random_segment(rng, {3, 5, 100, 200});
  const std::vector<double> w = {0.25, 1.0, 0.5};
  const std::vector<DropAllOption> drop(3, DropAllOption{10.0});
  const std::int64_t budget = v.packet(1, 0).size_bytes + 50;
  const Schedule s = schedule_with_fallback(v, w, budget, drop);
  EXPECT_LE(s.rate_bytes, budget);
  EXPECT_NO_THROW(s.kept.validate(5, false));
  // Only the heaviest tile can be served, and it must be.
  EXPECT_FALSE(s.kept.tile(1).empty());
  EXPECT_EQ(s.kept.tile(1).front(), 0);
  EXPECT_TRUE(s.kept.tile(0).empty());
  EXPECT_TRUE(s.kept.tile(2).empty());
  // Zero budget drops everything.
  EXPECT_EQ(schedule_with_fallback(v, w, 0, drop).kept.packet_count(), 0u);
  // When the mandatory set fits it is the ordinary schedule.
  EXPECT_EQ(schedule_with_fallback(v, w, v.total_bytes(), drop).kept, TransmissionSet::full(3, 5));
}

TEST(Baselines, TailDropExamples) {
  VideoSegment v;
  v.frames_per_tile = 5;
  TileStream s;
  s.gop_length = 5;
  for (int f = 0; f < 5; ++f) s.packets.push_back({0, f, f == 0 ? FrameType::I : FrameType::P, 10, 0.0});
  v.tiles.push_back(s);
  v.distortion.push_back(DistortionMatrix(5));
  const auto queue = arrival_order(v);
  EXPECT_EQ(tail_drop(v, queue, 30).kept.tile(0), (FrameSet{0, 1, 2}));
  EXPECT_EQ(tail_drop(v, queue, 1000).kept.tile(0), (FrameSet{0, 1, 2, 3, 4}));
  EXPECT_TRUE(tail_drop(v, queue, 0).kept.tile(0).empty());
}

TEST(Baselines, IpbDropsBThenPThenI) {
  SynthConfig c;
  c.tiles = 2;
  c.frames = 12;
  c.gop_length = 6;
  c.seed = 5;
  const VideoSegment v = synth_video(c);
  const auto queue = arrival_order(v);
  // Short by one B packet: exactly one B is dropped.
  const Schedule one = ipb_drop(v, queue, v.total_bytes() - 1);
  const auto dropped = one.dropped(v);
  ASSERT_EQ(dropped.size(), 1u);
  EXPECT_EQ(v.packet(dropped[0].tile, dropped[0].frame).type, FrameType::B);

  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    const std::int64_t budget = static_cast<std::int64_t>(rng() % (v.total_bytes() + 1));
    const Schedule s = ipb_drop(v, queue, budget);
    EXPECT_LE(s.rate_bytes, budget);
    bool kept_b = false, kept_p = false, dropped_p = false, dropped_i = false;
    for (int t = 0; t < 2; ++t) {
      for (int f = 0; f < 12; ++f) {
        const bool kept = s.kept.contains(t, f);
        const FrameType type = v.packet(t, f).type;
        kept_b |= kept && type == FrameType::B;
        kept_p |= kept && type == FrameType::P;
        dropped_p |= !kept && type == FrameType::P;
        dropped_i |= !kept && type == FrameType::I;
      }
    }
    if (dropped_p) EXPECT_FALSE(kept_b);
    if (dropped_i) EXPECT_FALSE(kept_b || kept_p);
  }
}

TEST(Baselines, IpbOnAllIStreamIsTailDrop) {
  SynthConfig c;
  c.tiles = 2;
  c.frames = 6;
  c.gop_length = 1;
  const VideoSegment v = synth_video(c);
  const auto queue = arrival_order(v);
  for (std::int64_t b = 0; b <= v.total_bytes(); b += 5000) {
    EXPECT_EQ(ipb_drop(v, queue, b).kept, tail_drop(v, queue, b).kept);
    EXPECT_EQ(nirap_drop(v, queue, b).kept, tail_drop(v, queue, b).kept);
  }
}

TEST(Baselines, NirapKeepsIFramesFirst) {
  SynthConfig c;
  c.tiles = 3;
  c.frames = 10;
  c.gop_length = 5;
  const VideoSegment v = synth_video(c);
  const auto queue = arrival_order(v);
  std::int64_t i_bytes = 0;
  for (const auto& t : v.tiles) {
    for (const auto& p : t.packets) {
      if (p.type == FrameType::I) i_bytes += p.size_bytes;
    }
  }
  const Schedule s = nirap_drop(v, queue, i_bytes);
  for (int t = 0; t < 3; ++t) EXPECT_EQ(s.kept.tile(t), (FrameSet{0, 5}));
  EXPECT_EQ(nirap_drop(v, queue, v.total_bytes()).kept, TransmissionSet::full(3, 10));
}

TEST(Baselines, RespectBudgetAndAreDeterministic) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {1 + k % 4, 1 + static_cast<int>(rng() % 10)});
    const auto queue = arrival_order(v);
    const std::int64_t budget = static_cast<std::int64_t>(rng() % (v.total_bytes() + 1));
    for (auto* fn : {&tail_drop, &ipb_drop, &nirap_drop}) {
      const Schedule a = fn(v, queue, budget);
      EXPECT_LE(a.rate_bytes, budget);
      EXPECT_EQ(a.rate_bytes, transmitted_bytes(v, a.kept));
      EXPECT_EQ(fn(v, queue, budget).kept, a.kept);
    }
  }
}

TEST(Baselines, EwrdNeverWorseThanHeuristicsOnSmallInstances) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {1 + k % 3, 1 + static_cast<int>(rng() % 6)});
    const auto queue = arrival_order(v);
    const std::int64_t budget = random_budget(rng, v);
    const Schedule e = schedule(v, std::vector<double>(v.tile_count(), 1.0), budget, {{}, {1}});
    for (auto* fn : {&tail_drop, &ipb_drop, &nirap_drop}) {
      EXPECT_LE(e.weighted_distortion, fn(v, queue, budget).weighted_distortion + 1e-9);
    }
  }
}

TEST(Baselines, RejectMalformedQueues) {
  std::mt19937_64 rng(9);
  const VideoSegment v = oracle::random_segment(rng, {1, 3});
  const std::vector<PacketRef> dup = {{0, 0}, {0, 0}};
  EXPECT_THROW(tail_drop(v, dup, 100), ValidationError);
  const std::vector<PacketRef> outside = {{0, 3}};
  EXPECT_THROW(ipb_drop(v, outside, 100), ValidationError);
}
