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

#include "tilesched/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "tilesched/baselines.hpp"
#include "tilesched/error.hpp"
#include "text_io.hpp"

namespace tilesched {

std::string_view strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::kBaseline: return "baseline";
    case Strategy::kNirap: return "nirap";
    case Strategy::kIpb: return "ipb";
    case Strategy::kEwrd: return "ewrd";
    case Strategy::kTwrd: return "twrd";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (strategy_name(s) == name) return s;
  }
  throw ValidationError("unknown strategy '" + std::string(name) +
                        "' (expected baseline, nirap, ipb, ewrd or twrd)");
}

void SessionConfig::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw ValidationError("fps must be positive");
  if (window_frames < 0) throw ValidationError("window_frames must be non-negative");
  if (!(trigger_threshold > 0.0 && trigger_threshold <= 1.0)) {
    throw ValidationError("trigger threshold must be in (0, 1]");
  }
  if (buffer_capacity_bytes < 0) throw ValidationError("buffer capacity must be non-negative");
  grid.validate();
  viewport.validate();
  if (viewport_min_class < 1 || viewport_min_class > kClassCount) {
    throw ValidationError("viewport_min_class must be in 1..4");
  }
  if (history_samples <= 0) throw ValidationError("history_samples must be positive");
  if (schedule.trellis.rate_quantum <= 0 || schedule.allocator.rate_quantum <= 0) {
    throw ValidationError("rate quanta must be positive");
  }
  if (schedule.trellis.max_rate_levels < 0) {
    throw ValidationError("trellis level cap must be non-negative");
  }
}

std::array<double, 5> metric_values(const MetricsReport& r) {
  return {r.total_distortion, r.viewport_distortion, r.total_packet_loss_pct,
          r.viewport_packet_loss_pct, r.viewport_bandwidth_consumption_pct};
}

namespace {

std::int64_t frame_time_ms(int frame, double fps) {
  return std::llround(frame * 1000.0 / fps);
}

// Distortion of the frames in [begin, end) of one tile, under kept, counting
// only frames the mask selects (all frames when mask is null).
double range_distortion(const TileView& tile, const FrameSet& kept, const std::vector<bool>* mask) {
  const std::vector<double> per_frame = frame_distortions(tile, kept);
  double total = 0.0;
  for (std::size_t f = 0; f < per_frame.size(); ++f) {
    if (mask == nullptr || (*mask)[f]) total += per_frame[f];
  }
  return total;
}

}  // namespace

ViewportMask viewport_mask(const VideoSegment& video, const Trajectory& truth,
                           const SessionConfig& config) {
  config.validate();
  if (truth.empty()) throw ValidationError("viewport mask needs a ground-truth trajectory");
  if (video.tile_count() != config.grid.tile_count()) {
    throw ValidationError("segment has " + std::to_string(video.tile_count()) +
                          " tiles but the grid has " + std::to_string(config.grid.tile_count()));
  }
  ViewportMask mask(video.tile_count(), std::vector<bool>(video.frames_per_tile, false));
  std::int64_t cached_t = -1;
  std::vector<int> classes;
  for (int f = 0; f < video.frames_per_tile; ++f) {
    const auto& sample = truth.nearest(frame_time_ms(f, config.fps));
    if (sample.t_ms != cached_t) {
      classes = classify_tiles(sample.view, config.grid, config.viewport);
      cached_t = sample.t_ms;
    }
    for (int t = 0; t < video.tile_count(); ++t) {
      mask[t][f] = classes[t] >= config.viewport_min_class;
    }
  }
  return mask;
}

MetricsReport compute_metrics(const VideoSegment& video, const TransmissionSet& kept,
                              const ViewportMask& viewport, bool loss_over_viewport_packets) {
  if (kept.tile_count() != video.tile_count() ||
      static_cast<int>(viewport.size()) != video.tile_count()) {
    throw ValidationError("metrics need one kept set and one mask row per tile");
  }
  kept.validate(video.frames_per_tile, false);
  MetricsReport r;
  const TransmissionSet reference = TransmissionSet::mandatory(video.tile_count());
  for (int t = 0; t < video.tile_count(); ++t) {
    const TileView tile = tile_view(video, t);
    const auto& mask = viewport[t];
    if (static_cast<int>(mask.size()) != video.frames_per_tile) {
      throw ValidationError("viewport mask row has the wrong frame count");
    }
    r.raw_total_distortion += range_distortion(tile, kept.tile(t), nullptr);
    r.raw_viewport_distortion += range_distortion(tile, kept.tile(t), &mask);
    r.reference_total_distortion += range_distortion(tile, reference.tile(t), nullptr);
    r.reference_viewport_distortion += range_distortion(tile, reference.tile(t), &mask);
    for (int f = 0; f < video.frames_per_tile; ++f) {
      const bool sent = kept.contains(t, f);
      const std::int64_t size = video.packet(t, f).size_bytes;
      ++r.total_packets;
      if (mask[f]) ++r.viewport_packets;
      if (!sent) {
        ++r.dropped_packets;
        if (mask[f]) ++r.dropped_viewport_packets;
      } else {
        r.transmitted_bytes += size;
        if (mask[f]) r.transmitted_viewport_bytes += size;
      }
    }
  }
  const auto pct = [](double num, double den) { return den > 0.0 ? 100.0 * num / den : 0.0; };
  r.total_distortion = pct(r.raw_total_distortion, r.reference_total_distortion);
  r.viewport_distortion = pct(r.raw_viewport_distortion, r.reference_viewport_distortion);
  r.total_packet_loss_pct = pct(r.dropped_packets, r.total_packets);
  r.viewport_packet_loss_pct =
      pct(r.dropped_viewport_packets,
          loss_over_viewport_packets ? r.viewport_packets : r.total_packets);
  r.viewport_bandwidth_consumption_pct =
      pct(static_cast<double>(r.transmitted_viewport_bytes), static_cast<double>(r.transmitted_bytes));
  return r;
}

MetricsReport run_session(const VideoSegment& video, const Predictor& predictor,
                          Strategy strategy, const BandwidthTrace& trace,
                          const Trajectory& truth, const SessionConfig& config) {
  config.validate();
  video.validate();
  const int n = video.frames_per_tile;
  const int window = config.window_frames > 0 ? config.window_frames : video.tiles.front().gop_length;
  const double session_ms = n * 1000.0 / config.fps;
  const double origin = static_cast<double>(trace.start_ms());
  if (static_cast<double>(trace.end_ms()) - origin < session_ms) {
    throw ValidationError("trace covers " + std::to_string(trace.end_ms() - trace.start_ms()) +
                          " ms but the session lasts " + text::format_double(session_ms) + " ms");
  }
  std::int64_t largest = 0;
  for (const auto& tile : video.tiles) {
    for (const auto& p : tile.packets) largest = std::max(largest, p.size_bytes);
  }
  if (config.buffer_capacity_bytes > 0 && config.buffer_capacity_bytes < largest) {
    throw ValidationError("buffer capacity " + std::to_string(config.buffer_capacity_bytes) +
                          " bytes is smaller than the largest packet (" + std::to_string(largest) +
                          " bytes)");
  }
  const ViewportMask mask = viewport_mask(video, truth, config);

  TransmissionSet kept(video.tile_count());
  std::vector<WindowRecord> records;
  for (int first = 0, index = 0; first < n; first += window, ++index) {
    const int end = std::min(n, first + window);
    WindowRecord rec;
    rec.index = index;
    rec.first_frame = first;
    rec.frames = end - first;
    const double begin_ms = first * 1000.0 / config.fps;
    const double end_ms = end * 1000.0 / config.fps;
    rec.budget_bytes = trace.bytes_between(origin + begin_ms, origin + end_ms);
    rec.capacity_bytes = config.buffer_capacity_bytes > 0 ? config.buffer_capacity_bytes
                                                          : std::max(rec.budget_bytes, largest);

    const VideoSegment slice = video.slice_frames(first, end);
    const std::vector<PacketRef> queue = arrival_order(slice);
    rec.offered_packets = static_cast<int>(queue.size());
    rec.offered_bytes = slice.total_bytes();
    // Burst arrival: the queue holds the whole window at once.
    rec.triggered = static_cast<double>(rec.offered_bytes) >
                    config.trigger_threshold * static_cast<double>(rec.capacity_bytes);
    const std::int64_t budget = std::min(rec.budget_bytes, rec.capacity_bytes);

    Schedule chosen;
    if (!rec.triggered) {
      // Plain FIFO; whatever misses the window deadline is lost.
      chosen = tail_drop(slice, queue, budget);
    } else if (strategy == Strategy::kBaseline) {
      chosen = tail_drop(slice, queue, budget);
    } else if (strategy == Strategy::kNirap) {
      chosen = nirap_drop(slice, queue, budget);
    } else if (strategy == Strategy::kIpb) {
      chosen = ipb_drop(slice, queue, budget);
    } else {
      std::vector<double> lambda(video.tile_count(), 1.0);
      if (strategy == Strategy::kTwrd) {
        const std::int64_t now = std::llround(begin_ms);
        const Trajectory seen = truth.history(now);
        if (seen.empty()) throw ValidationError("no trajectory history before the first window");
        const auto& s = seen.samples();
        const std::size_t keep = std::min<std::size_t>(s.size(), config.history_samples);
        const Trajectory history(std::vector<TrajectorySample>(s.end() - keep, s.end()));
        const int horizon = std::max<int>(
            1, static_cast<int>(std::ceil((end_ms - begin_ms) / kSamplePeriodMs)));
        const Prediction prediction = predictor.predict(history, horizon);
        // The viewport moves within a window; average the weights of the
        // predicted points that fall inside it.
        std::fill(lambda.begin(), lambda.end(), 0.0);
        int used = 0;
        for (const auto& point : prediction.points) {
          if (point.t_ms < begin_ms || point.t_ms >= end_ms) continue;
          const auto w = weights_for_prediction(point, config.grid, config.viewport).lambda;
          for (int t = 0; t < video.tile_count(); ++t) lambda[t] += w[t];
          ++used;
        }
        if (used == 0) {
          const std::int64_t middle = std::llround(0.5 * (begin_ms + end_ms));
          lambda = weights_for_prediction(prediction.nearest(middle), config.grid, config.viewport)
                       .lambda;
        } else {
          for (double& l : lambda) l /= used;
        }
      }
      // Dropping a whole tile conceals its window from the last frame
      // already delivered.
      std::vector<DropAllOption> drop_all(video.tile_count());
      for (int t = 0; t < video.tile_count(); ++t) {
        const TileView tile = tile_view(video, t);
        const FrameSet& sent = kept.tile(t);
        const int ref = sent.empty() ? kNoReference : sent.back();
        double d = 0.0;
        for (int f = first; f < end; ++f) {
          d += (ref == kNoReference ? kUnreferencedFrameDistortion : tile.distortion.at(f, ref)) +
               tile.stream.packets[f].propagation_penalty;
        }
        drop_all[t].distortion = d;
      }
      chosen = schedule_with_fallback(slice, lambda, budget, drop_all, config.schedule);
      std::int64_t mandatory = 0;
      for (const auto& tile : slice.tiles) mandatory += tile.packets.front().size_bytes;
      rec.degraded = mandatory > budget;
    }

    rec.transmitted_packets = static_cast<int>(chosen.kept.packet_count());
    rec.transmitted_bytes = chosen.rate_bytes;
    rec.dropped_packets = rec.offered_packets - rec.transmitted_packets;
    for (int t = 0; t < video.tile_count(); ++t) {
      for (int f : chosen.kept.tile(t)) kept.tile(t).push_back(first + f);
    }
    records.push_back(rec);
  }

  MetricsReport report =
      compute_metrics(video, kept, mask, config.viewport_loss_over_viewport_packets);
  report.windows = std::move(records);
  return report;
}

CorpusRates corpus_rates(const VideoSegment& video, double fps) {
  if (!(fps > 0.0)) throw ValidationError("fps must be positive");
  if (video.frames_per_tile <= 0) throw ValidationError("empty segment");
  double intra = 0.0;
  for (const auto& tile : video.tiles) {
    for (const auto& p : tile.packets) {
      if (p.type == FrameType::I) intra += static_cast<double>(p.size_bytes);
    }
  }
  const double seconds = video.frames_per_tile / fps;
  return {intra * 8.0 / seconds / 1e6, static_cast<double>(video.total_bytes()) * 8.0 / seconds / 1e6};
}

double scaled_to_corpus(double nominal_mbps, const CorpusRates& rates, double top_mbps) {
  if (!(top_mbps > 0.0)) throw ValidationError("top rate must be positive");
  if (nominal_mbps < 0.0) throw ValidationError("rate must be non-negative");
  return rates.intra_mbps + nominal_mbps / top_mbps * (rates.full_mbps - rates.intra_mbps);
}

std::vector<ComparisonRow> compare_strategies(std::span<const SessionInput> inputs,
                                              std::span<const Scenario> scenarios,
                                              const SessionConfig& config) {
  if (inputs.empty()) throw ValidationError("comparison needs at least one session input");
  std::vector<ComparisonRow> rows;
  for (const auto& scenario : scenarios) {
    for (Strategy strategy : kAllStrategies) {
      std::vector<std::array<double, 5>> runs;
      for (const auto& input : inputs) {
        if (!input.video || !input.predictor) throw ValidationError("incomplete session input");
        runs.push_back(metric_values(run_session(*input.video, *input.predictor, strategy,
                                                 scenario.trace, input.truth, config)));
      }
      ComparisonRow row;
      row.scenario = scenario.label;
      row.bandwidth_mbps = scenario.bandwidth_mbps;
      row.strategy = strategy;
      row.runs = static_cast<int>(runs.size());
      for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
        double sum = 0.0;
        for (const auto& r : runs) sum += r[m];
        const double mean = sum / runs.size();
        double sq = 0.0;
        for (const auto& r : runs) sq += (r[m] - mean) * (r[m] - mean);
        row.metrics[m].mean = mean;
        row.metrics[m].stddev = runs.size() > 1 ? std::sqrt(sq / (runs.size() - 1)) : 0.0;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_comparison_csv(std::span<const ComparisonRow> rows, std::ostream& out) {
  out << "scenario,bandwidth_mbps,strategy,metric,mean,std,runs\n";
  for (const auto& row : rows) {
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
      out << row.scenario << ',' << text::format_double(row.bandwidth_mbps) << ','
          << strategy_name(row.strategy) << ',' << kMetricNames[m] << ','
          << text::format_double(row.metrics[m].mean) << ','
          << text::format_double(row.metrics[m].stddev) << ',' << row.runs << '\n';
    }
  }
}

}  // namespace tilesched
