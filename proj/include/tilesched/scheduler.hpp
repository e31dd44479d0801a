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

// Multi-tile rate-distortion scheduling: per-tile RD curves coupled by a
// multiple-choice knapsack over the shared rate budget.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tilesched/schedule.hpp"
#include "tilesched/trellis.hpp"
#include "tilesched/viewport.hpp"

namespace tilesched {

struct AllocatorOptions {
  std::int64_t rate_quantum = 188;
};

// One option per tile: the chosen curve point index. Point rates are
// rounded up to whole quanta and the budget down, so the result is feasible
// and within one quantum per tile of the unquantized optimum.
// Throws InfeasibleError listing the tiles when first points do not fit.
std::vector<int> allocate_budget(std::span<const RdCurve> curves, std::int64_t rate_budget,
                                 const AllocatorOptions& options = {});

struct ScheduleOptions {
  TrellisOptions trellis{};
  AllocatorOptions allocator{};
};

// Minimum weighted distortion subject to the total rate budget, frame 0 of
// every tile kept. Weights are rescaled by their maximum before optimizing;
// the returned distortion is under the weights as given.
Schedule schedule(const VideoSegment& video, std::span<const double> lambda,
                  std::int64_t rate_budget, const ScheduleOptions& options = {});

// Equal-weight variant of schedule().
Schedule ewrd_schedule(const VideoSegment& video, std::int64_t rate_budget,
                       const ScheduleOptions& options = {});

// Extra option for a tile when the mandatory packets cannot all be sent:
// drop every packet of the tile at this weighted cost.
// Unweighted distortion of a tile whose whole window is dropped; the
// scheduler applies the tile weight.
struct DropAllOption {
  double distortion = 0.0;
};

// schedule() that degrades gracefully when the budget cannot hold frame 0 of
// every tile: tiles may then be dropped entirely, at the cost given per tile.
// Falls back to schedule() whenever the mandatory set fits.
Schedule schedule_with_fallback(const VideoSegment& video, std::span<const double> lambda,
                                std::int64_t rate_budget,
                                std::span<const DropAllOption> drop_all,
                                const ScheduleOptions& options = {});

inline constexpr int kBruteForceMaxPackets = 20;

// Exhaustive search over transmission sets keeping frame 0 of every tile.
// Ties go to the smaller rate. Throws ValidationError above 20 packets.
Schedule brute_force_schedule(const VideoSegment& video, std::span<const double> lambda,
                              std::int64_t rate_budget);

}  // namespace tilesched
