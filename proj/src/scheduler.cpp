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

#include "tilesched/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "tilesched/error.hpp"

namespace tilesched {

namespace {

struct Option {
  std::int64_t rate = 0;
  double cost = 0.0;
};

// Multiple-choice knapsack: one option per group, minimum total cost with
// total rate <= budget. Rates above each group's cheapest option are rounded
// up to quanta, so the answer is at least as good as the exact optimum for a
// budget one quantum per group smaller, and never worse for a larger budget.
// Caller guarantees the cheapest options fit together.
std::vector<int> solve_mckp(const std::vector<std::vector<Option>>& groups, std::int64_t budget,
                            std::int64_t quantum) {
  const std::size_t g = groups.size();
  std::int64_t base = 0;
  std::int64_t top = 0;
  for (const auto& opts : groups) {
    base += opts.front().rate;
    top += opts.back().rate;
  }
  std::vector<int> choice(g, 0);
  if (top <= budget) {
    for (std::size_t t = 0; t < g; ++t) choice[t] = static_cast<int>(groups[t].size()) - 1;
    return choice;
  }

  const std::int64_t levels = (budget - base) / quantum;
  const auto width = static_cast<std::size_t>(levels + 1);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(width, 0.0), next(width);
  std::vector<std::vector<int>> pick(g, std::vector<int>(width, 0));

  for (std::size_t t = 0; t < g; ++t) {
    const auto& opts = groups[t];
    std::vector<std::int64_t> lv(opts.size());
    for (std::size_t k = 0; k < opts.size(); ++k) {
      lv[k] = (opts[k].rate - opts.front().rate + quantum - 1) / quantum;
    }
    for (std::size_t b = 0; b < width; ++b) {
      double best = kInf;
      int arg = 0;
      for (std::size_t k = 0; k < opts.size(); ++k) {
        if (lv[k] > static_cast<std::int64_t>(b)) break;  // options ascend in rate
        const double c = prev[b - lv[k]] + opts[k].cost;
        if (c < best) {
          best = c;
          arg = static_cast<int>(k);
        }
      }
      next[b] = best;
      pick[t][b] = arg;
    }
    std::swap(prev, next);
  }

  std::size_t b = width - 1;
  for (std::size_t t = g; t-- > 0;) {
    const int k = pick[t][b];
    choice[t] = k;
    b -= static_cast<std::size_t>((groups[t][k].rate - groups[t].front().rate + quantum - 1) /
                                  quantum);
  }

  return choice;
}

std::vector<double> normalized(std::span<const double> lambda) {
  double top = 0.0;
  for (double l : lambda) {
    if (!(l >= 0.0)) throw ValidationError("tile weights must be non-negative");
    top = std::max(top, l);
  }
  std::vector<double> out(lambda.begin(), lambda.end());
  if (top > 0.0) {
    for (double& l : out) l /= top;
  }
  return out;
}

void check_weights(const VideoSegment& video, std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != video.tile_count()) {
    throw ValidationError("expected " + std::to_string(video.tile_count()) + " tile weights, got " +
                          std::to_string(lambda.size()));
  }
}

std::vector<RdCurve> build_curves(const VideoSegment& video, std::span<const double> lambda,
                                  const TrellisOptions& options) {
  std::vector<RdCurve> curves;
  curves.reserve(video.tile_count());
  for (int t = 0; t < video.tile_count(); ++t) {
    curves.push_back(per_tile_rd_curve(tile_view(video, t), lambda[t], options));
  }
  return curves;
}

std::int64_t mandatory_bytes(const VideoSegment& video) {
  std::int64_t total = 0;
  for (const auto& tile : video.tiles) total += tile.packets.front().size_bytes;
  return total;
}

}  // namespace

std::vector<int> allocate_budget(std::span<const RdCurve> curves, std::int64_t rate_budget,
                                 const AllocatorOptions& options) {
  if (options.rate_quantum <= 0) throw ValidationError("rate quantum must be positive");
  std::int64_t mandatory = 0;
  for (const auto& c : curves) {
    if (c.empty()) throw ValidationError("empty rate-distortion curve");
    mandatory += c.front().rate_bytes;
  }
  if (mandatory > rate_budget) {
    std::string msg = "budget " + std::to_string(rate_budget) + " bytes cannot hold the " +
                      std::to_string(mandatory) + " mandatory bytes of tiles";
    for (std::size_t t = 0; t < curves.size(); ++t) {
      msg += (t == 0 ? " " : ", ") + std::to_string(t) + " (" +
             std::to_string(curves[t].front().rate_bytes) + ")";
    }
    throw InfeasibleError(msg);
  }
  std::vector<std::vector<Option>> groups(curves.size());
  for (std::size_t t = 0; t < curves.size(); ++t) {
    for (const auto& p : curves[t]) groups[t].push_back({p.rate_bytes, p.weighted_distortion});
  }
  return solve_mckp(groups, rate_budget, options.rate_quantum);
}

Schedule schedule(const VideoSegment& video, std::span<const double> lambda,
                  std::int64_t rate_budget, const ScheduleOptions& options) {
  check_weights(video, lambda);
  const std::vector<double> scaled = normalized(lambda);
  const std::vector<RdCurve> curves = build_curves(video, scaled, options.trellis);
  const std::vector<int> choice = allocate_budget(curves, rate_budget, options.allocator);
  TransmissionSet kept(video.tile_count());
  for (int t = 0; t < video.tile_count(); ++t) kept.tile(t) = curves[t][choice[t]].kept;
  return make_schedule(video, std::move(kept), lambda);
}

Schedule ewrd_schedule(const VideoSegment& video, std::int64_t rate_budget,
                       const ScheduleOptions& options) {
  const std::vector<double> ones(video.tile_count(), 1.0);
  return schedule(video, ones, rate_budget, options);
}

Schedule schedule_with_fallback(const VideoSegment& video, std::span<const double> lambda,
                                std::int64_t rate_budget, std::span<const DropAllOption> drop_all,
                                const ScheduleOptions& options) {
  check_weights(video, lambda);
  if (mandatory_bytes(video) <= rate_budget) return schedule(video, lambda, rate_budget, options);
  if (static_cast<int>(drop_all.size()) != video.tile_count()) {
    throw ValidationError("need one drop-all option per tile");
  }
  if (options.allocator.rate_quantum <= 0) throw ValidationError("rate quantum must be positive");

  const std::vector<double> scaled = normalized(lambda);
  const std::vector<RdCurve> curves = build_curves(video, scaled, options.trellis);
  std::vector<std::vector<Option>> groups(curves.size());
  for (std::size_t t = 0; t < curves.size(); ++t) {
    groups[t].push_back({0, scaled[t] * drop_all[t].distortion});
    for (const auto& p : curves[t]) {
      // A curve point is only worth its bytes if it beats dropping the tile.
      if (p.weighted_distortion < groups[t].back().cost) {
        groups[t].push_back({p.rate_bytes, p.weighted_distortion});
      }
    }
  }
  const std::vector<int> choice =
      solve_mckp(groups, std::max<std::int64_t>(rate_budget, 0), options.allocator.rate_quantum);

  TransmissionSet kept(video.tile_count());
  for (int t = 0; t < video.tile_count(); ++t) {
    if (choice[t] == 0) continue;
    // Option k > 0 is the curve point with the same rate.
    const std::int64_t rate = groups[t][choice[t]].rate;
    for (const auto& p : curves[t]) {
      if (p.rate_bytes == rate) {
        kept.tile(t) = p.kept;
        break;
      }
    }
  }
  return make_schedule(video, std::move(kept), lambda);
}

Schedule brute_force_schedule(const VideoSegment& video, std::span<const double> lambda,
                              std::int64_t rate_budget) {
  check_weights(video, lambda);
  if (video.packet_count() > kBruteForceMaxPackets) {
    throw ValidationError("brute force is limited to " + std::to_string(kBruteForceMaxPackets) +
                          " packets, got " + std::to_string(video.packet_count()));
  }
  if (mandatory_bytes(video) > rate_budget) {
    throw InfeasibleError("budget cannot hold frame 0 of every tile");
  }
  std::vector<PacketRef> optional;
  for (int t = 0; t < video.tile_count(); ++t) {
    for (int f = 1; f < video.frames_per_tile; ++f) optional.push_back({t, f});
  }
  const std::uint32_t combos = 1u << optional.size();
  bool found = false;
  Schedule best;
  for (std::uint32_t mask = 0; mask < combos; ++mask) {
    TransmissionSet kept = TransmissionSet::mandatory(video.tile_count());
    for (std::size_t k = 0; k < optional.size(); ++k) {
      if (mask & (1u << k)) kept.tile(optional[k].tile).push_back(optional[k].frame);
    }
    const std::int64_t rate = transmitted_bytes(video, kept);
    if (rate > rate_budget) continue;
    const double cost = weighted_distortion(video, kept, lambda);
    if (!found || cost < best.weighted_distortion ||
        (cost == best.weighted_distortion && rate < best.rate_bytes)) {
      found = true;
      best.kept = std::move(kept);
      best.rate_bytes = rate;
      best.weighted_distortion = cost;
    }
  }
  return best;
}

}  // namespace tilesched
