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

// Single-tile dynamic program over transmission sets.
//
// A trellis node is a transmission set that starts at frame 0 and ends at
// frame e. Its cost is the weighted distortion lambda * D(P \ S). The start
// node S = {0} costs lambda * (sum_{i>=1} d[i][0] + sum_{eta>=1} omega(eta));
// admitting e after a set ending at s lowers the cost by phi(s, e).
//
// Costs do not depend on how many packets a set holds, but the rate budget
// does, so each end frame keeps the Pareto frontier of (rate, cost) over the
// sets ending there. Rates are bucketed by `rate_quantum` when pruning
// (quantum 1 keeps the exact frontier). With L = budget / quantum levels the
// work is O(n^2 L), so L is capped: past max_rate_levels the quantum grows
// with the budget. Small tiles stay exact.

#include <cstdint>
#include <vector>

#include "tilesched/distortion.hpp"
#include "tilesched/media.hpp"
#include "tilesched/schedule.hpp"

namespace tilesched {

struct TrellisOptions {
  std::int64_t rate_quantum = 1;
  // 0 lifts the cap.
  std::int64_t max_rate_levels = 1024;
};

// Suffix column sums of one tile's table: sum_{i=e}^{n-1} d[i][j] for j <= e.
class TileCosts {
 public:
  TileCosts(const TileView& tile, double lambda);

  int frames() const { return frames_; }
  double lambda() const { return lambda_; }
  // Weighted distortion gain of admitting e right after s (s < e).
  double phi(int s, int e) const;
  // Weighted distortion of S = {0}.
  double initial_cost() const { return initial_cost_; }

 private:
  double suffix(int e, int j) const {
    return suffix_[static_cast<std::size_t>(e) * (e + 1) / 2 + j];
  }

  int frames_;
  double lambda_;
  std::vector<double> omega_;
  std::vector<double> suffix_;
  double initial_cost_;
};

// Throws ValidationError unless 0 <= s < e < n.
double phi(const TileView& tile, double lambda, int s, int e);

struct TrellisState {
  int count = 1;          // m, packets in the set
  int last = 0;           // e
  double best_cost = 0;   // lambda * D(P \ S)
  int predecessor = -1;   // previous e, -1 for the start node
  int predecessor_slot = -1;
  std::int64_t rate_used = 0;
};

struct TileSchedule {
  FrameSet kept;
  std::int64_t rate_bytes = 0;
  // Weighted distortion recomputed by the distortion engine.
  double weighted_distortion = 0.0;
  // Cost carried by the trellis for the same set.
  double trellis_cost = 0.0;
};

// Minimum weighted distortion set with frame 0 kept and rate <= budget.
// Throws InfeasibleError when the budget cannot hold frame 0.
TileSchedule dp_single_tile(const TileView& tile, double lambda, std::int64_t rate_budget,
                            const TrellisOptions& options = {});

struct RdPoint {
  std::int64_t rate_bytes = 0;
  double weighted_distortion = 0.0;
  FrameSet kept;
};

// Rate strictly increasing, distortion strictly decreasing; starts at {0}
// and ends at a zero-distortion point.
using RdCurve = std::vector<RdPoint>;

RdCurve per_tile_rd_curve(const TileView& tile, double lambda, const TrellisOptions& options = {});

}  // namespace tilesched
