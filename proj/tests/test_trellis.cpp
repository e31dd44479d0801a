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

#include "oracles.hpp"
#include "tilesched/distortion.hpp"
#include "tilesched/error.hpp"
#include "tilesched/synth.hpp"
#include "tilesched/trellis.hpp"

using namespace tilesched;

namespace {

// n=3: d[1][0]=0.2, d[2][0]=0.5, d[2][1]=0.1, omega(p1)=0.3.
VideoSegment hand_tile() {
  VideoSegment v;
  v.frames_per_tile = 3;
  TileStream s;
  s.gop_length = 3;
  s.packets = {{0, 0, FrameType::I, 100, 0.0}, {0, 1, FrameType::P, 40, 0.3}, {0, 2, FrameType::B, 20, 0.0}};
  v.tiles.push_back(s);
  DistortionMatrix d(3);
  d.set(1, 0, 0.2);
  d.set(2, 0, 0.5);
  d.set(2, 1, 0.1);
  v.distortion.push_back(d);
  v.validate();
  return v;
}

std::int64_t total(const VideoSegment& v, int t) { return v.tiles[t].total_bytes(); }

}  // namespace

TEST(Phi, HandEvaluated) {
  const VideoSegment v = hand_tile();
  const TileView t = tile_view(v, 0);
  EXPECT_DOUBLE_EQ(phi(t, 1.0, 0, 1), 0.9);
  EXPECT_DOUBLE_EQ(set_distortion(t, {0}) - set_distortion(t, {0, 1}), 0.9);
  // Last frame, no penalty: a single concealment term.
  EXPECT_DOUBLE_EQ(phi(t, 1.0, 0, 2), 0.5);
  EXPECT_DOUBLE_EQ(phi(t, 2.0, 1, 2), 0.2);
  EXPECT_EQ(phi(t, 0.0, 0, 1), 0.0);
  EXPECT_THROW(phi(t, 1.0, 1, 1), ValidationError);
  EXPECT_THROW(phi(t, 1.0, 2, 1), ValidationError);
  EXPECT_THROW(phi(t, 1.0, 0, 3), ValidationError);
}

TEST(Phi, EqualsDistortionReductionOfAdmittingE) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {1, 2 + static_cast<int>(rng() % 12)});
    const TileView t = tile_view(v, 0);
    const int n = v.frames_per_tile;
    const int s = static_cast<int>(rng() % (n - 1));
    const int e = s + 1 + static_cast<int>(rng() % (n - 1 - s));
    // S ends at s; adding e (after everything kept) changes frames >= e only.
    FrameSet before;
    for (int f = 0; f <= s; ++f) before.push_back(f);
    FrameSet after = before;
    after.push_back(e);
    const double lambda = 0.25 + (rng() % 4) * 0.25;
    EXPECT_NEAR(phi(t, lambda, s, e),
                lambda * (set_distortion(t, before) - set_distortion(t, after)), 1e-12);
  }
}

TEST(TileCosts, InitialCostIsMandatoryOnlyDistortion) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {1, 1 + static_cast<int>(rng() % 15)});
    const TileCosts costs(tile_view(v, 0), 0.7);
    double expect = 0.0;
    for (int i = 1; i < v.frames_per_tile; ++i) {
      expect += v.distortion[0].at(i, 0) + v.tiles[0].packets[i].propagation_penalty;
    }
    EXPECT_NEAR(costs.initial_cost(), 0.7 * expect, 1e-12);
  }
}

TEST(DpSingleTile, GenerousBudgetKeepsEverything) {
  const VideoSegment v = hand_tile();
  const TileSchedule s = dp_single_tile(tile_view(v, 0), 1.0, total(v, 0));
  EXPECT_EQ(s.kept, (FrameSet{0, 1, 2}));
  EXPECT_EQ(s.weighted_distortion, 0.0);
  EXPECT_EQ(s.rate_bytes, 160);
}

TEST(DpSingleTile, FrameZeroBudgetForcesInitialState) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 30; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {1, 1 + static_cast<int>(rng() % 10), 10, 100});
    const TileView t = tile_view(v, 0);
    const TileSchedule s = dp_single_tile(t, 1.0, v.packet(0, 0).size_bytes);
    EXPECT_EQ(s.kept, (FrameSet{0}));
    EXPECT_NEAR(s.weighted_distortion, oracle::set_distortion(v, 0, 1), 1e-12);
    EXPECT_THROW(dp_single_tile(t, 1.0, v.packet(0, 0).size_bytes - 1), InfeasibleError);
  }
}

TEST(DpSingleTile, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 150; ++k) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const VideoSegment v = oracle::random_segment(rng, {1, n});
    const TileView t = tile_view(v, 0);
    const double lambda = 0.1 + static_cast<double>(rng() % 10) / 10;
    const std::int64_t lo = v.packet(0, 0).size_bytes;
    const std::int64_t budget = lo + static_cast<std::int64_t>(rng() % (total(v, 0) - lo + 1));
    const TileSchedule s = dp_single_tile(t, lambda, budget);
    const oracle::Best best = oracle::best_single_tile(v, 0, lambda, budget);
    ASSERT_TRUE(best.feasible);
    EXPECT_NEAR(s.weighted_distortion, best.cost, 1e-9) << "instance " << k;
    EXPECT_LE(s.rate_bytes, budget);
    ASSERT_FALSE(s.kept.empty());
    EXPECT_EQ(s.kept.front(), 0);
    // The trellis' own bookkeeping agrees with the distortion engine.
    EXPECT_NEAR(s.trellis_cost, s.weighted_distortion, 1e-9);
    EXPECT_NEAR(s.weighted_distortion, lambda * set_distortion(t, s.kept), 1e-12);
  }
}

TEST(DpSingleTile, TiesPreferTheSmallerRate) {
  // Frame 1 is worthless: keeping it changes nothing, so it must be dropped.
  VideoSegment v;
  v.frames_per_tile = 2;
  TileStream s;
  s.gop_length = 2;
  s.packets = {{0, 0, FrameType::I, 10, 0.0}, {0, 1, FrameType::B, 5, 0.0}};
  v.tiles.push_back(s);
  v.distortion.push_back(DistortionMatrix(2));
  const TileSchedule r = dp_single_tile(tile_view(v, 0), 1.0, 100);
  EXPECT_EQ(r.kept, (FrameSet{0}));
  EXPECT_EQ(r.rate_bytes, 10);
}

TEST(DpSingleTile, CoarseRateQuantumStaysFeasible) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const VideoSegment v = oracle::random_segment(rng, {1, 1 + static_cast<int>(rng() % 12)});
    const TileView t = tile_view(v, 0);
    const std::int64_t budget = v.packet(0, 0).size_bytes + static_cast<std::int64_t>(rng() % 3000);
    const TileSchedule coarse = dp_single_tile(t, 1.0, budget, {64});
    const TileSchedule exact = dp_single_tile(t, 1.0, budget);
    EXPECT_LE(coarse.rate_bytes, budget);
    EXPECT_EQ(coarse.kept.front(), 0);
    EXPECT_GE(coarse.weighted_distortion, exact.weighted_distortion - 1e-9);
  }
}

TEST(DpSingleTile, LevelCapOnlyCoarsensLargeBudgets) {
  SynthConfig c;
  c.tiles = 1;
  c.frames = 120;
  c.gop_length = 120;
  c.seed = 3;
  const VideoSegment v = synth_video(c);
  const TileView t = tile_view(v, 0);
  const std::int64_t budget = v.total_bytes() / 2;
  const TileSchedule capped = dp_single_tile(t, 1.0, budget, {1, 64});
  const TileSchedule exact = dp_single_tile(t, 1.0, budget, {1, 0});
  EXPECT_LE(capped.rate_bytes, budget);
  EXPECT_GE(capped.weighted_distortion, exact.weighted_distortion - 1e-9);
  // Budgets below the cap are untouched.
  const TileSchedule small = dp_single_tile(t, 1.0, budget, {1, budget});
  EXPECT_EQ(small.kept, exact.kept);
  EXPECT_THROW(dp_single_tile(t, 1.0, budget, {1, -1}), ValidationError);
}

TEST(DpSingleTile, RejectsBadArguments) {
  const VideoSegment v = hand_tile();
  EXPECT_THROW(dp_single_tile(tile_view(v, 0), -1.0, 1000), ValidationError);
  EXPECT_THROW(dp_single_tile(tile_view(v, 0), 1.0, 1000, {0}), ValidationError);
}

TEST(RdCurve, SingleFrameTile) {
  SynthConfig c;
  c.tiles = 1;
  c.frames = 1;
  c.gop_length = 1;
  const VideoSegment v = synth_video(c);
  const RdCurve curve = per_tile_rd_curve(tile_view(v, 0), 1.0);
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_EQ(curve[0].kept, (FrameSet{0}));
  EXPECT_EQ(curve[0].weighted_distortion, 0.0);
}

TEST(RdCurve, ParetoAndOptimalAtEveryPoint) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 60; ++k) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const VideoSegment v = oracle::random_segment(rng, {1, n});
    const TileView t = tile_view(v, 0);
    const double lambda = 0.5;
    const RdCurve curve = per_tile_rd_curve(t, lambda);
    ASSERT_FALSE(curve.empty());
    EXPECT_EQ(curve.front().kept, (FrameSet{0}));
    EXPECT_EQ(curve.back().weighted_distortion, 0.0);
    for (std::size_t p = 0; p < curve.size(); ++p) {
      if (p > 0) {
        EXPECT_GT(curve[p].rate_bytes, curve[p - 1].rate_bytes);
        EXPECT_LT(curve[p].weighted_distortion, curve[p - 1].weighted_distortion);
      }
      EXPECT_EQ(transmitted_bytes(v, TransmissionSet({curve[p].kept})), curve[p].rate_bytes);
      const oracle::Best best = oracle::best_single_tile(v, 0, lambda, curve[p].rate_bytes);
      EXPECT_NEAR(curve[p].weighted_distortion, best.cost, 1e-9) << "instance " << k << " point " << p;
    }
  }
}

TEST(RdCurve, ZeroWeightTileKeepsOnlyFrameZero) {
  std::mt19937_64 rng(7);
  const VideoSegment v = oracle::random_segment(rng, {1, 8});
  const RdCurve curve = per_tile_rd_curve(tile_view(v, 0), 0.0);
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_EQ(curve[0].kept, (FrameSet{0}));
}
