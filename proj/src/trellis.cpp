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

#include "tilesched/trellis.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "tilesched/error.hpp"

namespace tilesched {

TileCosts::TileCosts(const TileView& tile, double lambda)
    : frames_(tile.frames()),
      lambda_(lambda),
      omega_(tile.frames()),
      suffix_(static_cast<std::size_t>(tile.frames()) * (tile.frames() + 1) / 2, 0.0) {
  if (lambda < 0) throw ValidationError("tile weight must be non-negative");
  const int n = frames_;
  for (int i = 0; i < n; ++i) omega_[i] = tile.stream.packets[i].propagation_penalty;
  for (int j = 0; j < n; ++j) {
    double running = 0.0;
    for (int e = n - 1; e >= j; --e) {
      running += tile.distortion.at(e, j);
      suffix_[static_cast<std::size_t>(e) * (e + 1) / 2 + j] = running;
    }
  }
  double omega_tail = 0.0;
  for (int i = 1; i < n; ++i) omega_tail += omega_[i];
  initial_cost_ = n > 0 ? lambda_ * (suffix(0, 0) + omega_tail) : 0.0;
}

double TileCosts::phi(int s, int e) const {
  return lambda_ * (omega_[e] + suffix(e, s) - suffix(e, e));
}

double phi(const TileView& tile, double lambda, int s, int e) {
  const int n = tile.frames();
  if (s < 0 || e >= n || s >= e) {
    throw ValidationError("phi needs 0 <= s < e < n, got s=" + std::to_string(s) +
                          " e=" + std::to_string(e));
  }
  return TileCosts(tile, lambda).phi(s, e);
}

namespace {

// Deterministic preference between two states of equal level.
bool preferred(const TrellisState& a, const TrellisState& b) {
  if (a.best_cost != b.best_cost) return a.best_cost < b.best_cost;
  if (a.rate_used != b.rate_used) return a.rate_used < b.rate_used;
  if (a.predecessor != b.predecessor) return a.predecessor < b.predecessor;
  return a.predecessor_slot < b.predecessor_slot;
}

class Trellis {
 public:
  Trellis(const TileView& tile, double lambda, std::int64_t budget, const TrellisOptions& options)
      : tile_(tile), costs_(tile, lambda), budget_(budget), quantum_(options.rate_quantum) {
    if (quantum_ <= 0) throw ValidationError("rate quantum must be positive");
    if (options.max_rate_levels < 0) throw ValidationError("max_rate_levels must be >= 0");
    if (options.max_rate_levels > 0) {
      quantum_ = std::max(quantum_, (budget_ + options.max_rate_levels - 1) / options.max_rate_levels);
    }
    build();
  }

  const std::vector<std::vector<TrellisState>>& frontiers() const { return frontiers_; }

  FrameSet backtrack(int last, int slot) const {
    FrameSet kept;
    while (last >= 0) {
      kept.push_back(last);
      const TrellisState& s = frontiers_[last][slot];
      last = s.predecessor;
      slot = s.predecessor_slot;
    }
    std::reverse(kept.begin(), kept.end());
    return kept;
  }

 private:
  std::int64_t level(std::int64_t rate) const { return (rate + quantum_ - 1) / quantum_; }

  void build() {
    const int n = tile_.frames();
    frontiers_.assign(n, {});
    const std::int64_t first = tile_.stream.packets[0].size_bytes;
    if (first > budget_) return;
    frontiers_[0].push_back(TrellisState{1, 0, costs_.initial_cost(), -1, -1, first});

    const std::int64_t max_level = level(budget_);
    std::vector<TrellisState> candidates;
    for (int e = 1; e < n; ++e) {
      const std::int64_t size = tile_.stream.packets[e].size_bytes;
      std::size_t reachable = 0;
      for (int s = 0; s < e; ++s) reachable += frontiers_[s].size();
      if (max_level > 2 * static_cast<std::int64_t>(reachable) + 64) {
        // Sparse levels: collect and sort.
        candidates.clear();
        for (int s = 0; s < e; ++s) {
          const double gain = costs_.phi(s, e);
          const auto& from = frontiers_[s];
          for (std::size_t k = 0; k < from.size(); ++k) {
            const std::int64_t rate = from[k].rate_used + size;
            if (rate > budget_) break;  // frontiers are sorted by rate
            candidates.push_back(TrellisState{from[k].count + 1, e, from[k].best_cost - gain, s,
                                              static_cast<int>(k), rate});
          }
        }
        prune_sorted(candidates, frontiers_[e]);
        continue;
      }
      // Dense levels: best state per level in place. Scanning s and k upward
      // means the first arrival wins remaining ties.
      if (static_cast<std::int64_t>(slot_.size()) < max_level + 1) {
        slot_.assign(max_level + 1, TrellisState{});
        used_.assign(max_level + 1, false);
      }
      std::int64_t lo = max_level + 1, hi = -1;
      for (int s = 0; s < e; ++s) {
        const double gain = costs_.phi(s, e);
        const auto& from = frontiers_[s];
        for (std::size_t k = 0; k < from.size(); ++k) {
          const std::int64_t rate = from[k].rate_used + size;
          if (rate > budget_) break;
          const double cost = from[k].best_cost - gain;
          const std::int64_t l = level(rate);
          TrellisState& slot = slot_[l];
          if (!used_[l] || cost < slot.best_cost ||
              (cost == slot.best_cost && rate < slot.rate_used)) {
            slot = TrellisState{from[k].count + 1, e, cost, s, static_cast<int>(k), rate};
            used_[l] = true;
          }
          lo = std::min(lo, l);
          hi = std::max(hi, l);
        }
      }
      double best = std::numeric_limits<double>::infinity();
      for (std::int64_t l = lo; l <= hi; ++l) {
        if (!used_[l]) continue;
        used_[l] = false;
        if (slot_[l].best_cost < best) {
          best = slot_[l].best_cost;
          frontiers_[e].push_back(slot_[l]);
        }
      }
    }
  }

  // Keeps the best state per rate level, then the strictly improving ones in
  // rate order.
  void prune_sorted(std::vector<TrellisState>& candidates, std::vector<TrellisState>& out) const {
    std::sort(candidates.begin(), candidates.end(),
              [this](const TrellisState& a, const TrellisState& b) {
                const std::int64_t la = level(a.rate_used), lb = level(b.rate_used);
                if (la != lb) return la < lb;
                return preferred(a, b);
              });
    double best = std::numeric_limits<double>::infinity();
    std::int64_t last_level = -1;
    for (const auto& c : candidates) {
      const std::int64_t l = level(c.rate_used);
      if (l == last_level) continue;
      last_level = l;
      if (c.best_cost < best) {
        best = c.best_cost;
        out.push_back(c);
      }
    }
  }

  const TileView& tile_;
  TileCosts costs_;
  std::int64_t budget_;
  std::int64_t quantum_;
  std::vector<std::vector<TrellisState>> frontiers_;
  std::vector<TrellisState> slot_;
  std::vector<bool> used_;
};

std::int64_t rate_of(const TileView& tile, const FrameSet& kept) {
  std::int64_t rate = 0;
  for (int f : kept) rate += tile.stream.packets[f].size_bytes;
  return rate;
}

}  // namespace

TileSchedule dp_single_tile(const TileView& tile, double lambda, std::int64_t rate_budget,
                            const TrellisOptions& options) {
  if (tile.frames() == 0) throw ValidationError("tile has no frames");
  const std::int64_t first = tile.stream.packets[0].size_bytes;
  if (rate_budget < first) {
    throw InfeasibleError("budget " + std::to_string(rate_budget) +
                          " bytes cannot hold frame 0 of tile " +
                          std::to_string(tile.stream.tile_index) + " (" + std::to_string(first) +
                          " bytes)");
  }
  const Trellis trellis(tile, lambda, rate_budget, options);

  // Lowest cost, then lowest rate, then earliest end frame.
  int best_e = -1, best_slot = -1;
  const TrellisState* best = nullptr;
  const auto& frontiers = trellis.frontiers();
  for (int e = 0; e < static_cast<int>(frontiers.size()); ++e) {
    for (std::size_t k = 0; k < frontiers[e].size(); ++k) {
      const TrellisState& s = frontiers[e][k];
      if (best == nullptr || s.best_cost < best->best_cost ||
          (s.best_cost == best->best_cost && s.rate_used < best->rate_used)) {
        best = &s;
        best_e = e;
        best_slot = static_cast<int>(k);
      }
    }
  }

  TileSchedule out;
  out.kept = trellis.backtrack(best_e, best_slot);
  out.rate_bytes = best->rate_used;
  out.trellis_cost = best->best_cost;
  out.weighted_distortion = lambda * set_distortion(tile, out.kept);
  return out;
}

RdCurve per_tile_rd_curve(const TileView& tile, double lambda, const TrellisOptions& options) {
  if (tile.frames() == 0) throw ValidationError("tile has no frames");
  const std::int64_t total = tile.stream.total_bytes();
  const Trellis trellis(tile, lambda, total, options);

  struct Terminal {
    std::int64_t rate;
    double cost;
    int e;
    int slot;
  };
  std::vector<Terminal> terminals;
  const auto& frontiers = trellis.frontiers();
  for (int e = 0; e < static_cast<int>(frontiers.size()); ++e) {
    for (std::size_t k = 0; k < frontiers[e].size(); ++k) {
      terminals.push_back({frontiers[e][k].rate_used, frontiers[e][k].best_cost, e,
                           static_cast<int>(k)});
    }
  }
  std::sort(terminals.begin(), terminals.end(), [](const Terminal& a, const Terminal& b) {
    if (a.rate != b.rate) return a.rate < b.rate;
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.e < b.e;
  });

  RdCurve curve;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : terminals) {
    if (t.cost >= best) continue;
    best = t.cost;
    FrameSet kept = trellis.backtrack(t.e, t.slot);
    const double recomputed = lambda * set_distortion(tile, kept);
    // Trellis costs carry rounding; keep the curve strictly decreasing in the
    // recomputed values.
    if (!curve.empty() && recomputed >= curve.back().weighted_distortion) continue;
    curve.push_back(RdPoint{t.rate, recomputed, std::move(kept)});
  }
  if (curve.back().weighted_distortion > 0.0) {
    FrameSet all(tile.frames());
    for (int f = 0; f < tile.frames(); ++f) all[f] = f;
    curve.push_back(RdPoint{rate_of(tile, all), 0.0, std::move(all)});
  }
  return curve;
}

}  // namespace tilesched
