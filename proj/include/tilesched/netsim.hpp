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

// Discrete-time simulation of a congested network node serving one tiled
// segment, and the five-metric session report.
//
// The session is cut into windows (one GOP by default). All packets of a
// window arrive at its start, in arrival order, into a byte-based FIFO that
// drains at the trace rate. When the queue occupancy exceeds
// trigger_threshold * capacity the node runs its drop strategy against the
// bytes the link can deliver before the window ends; packets still queued at
// the end of a window are lost.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tilesched/media.hpp"
#include "tilesched/predictor.hpp"
#include "tilesched/schedule.hpp"
#include "tilesched/scheduler.hpp"
#include "tilesched/trace.hpp"
#include "tilesched/viewport.hpp"

namespace tilesched {

enum class Strategy { kBaseline, kNirap, kIpb, kEwrd, kTwrd };

inline constexpr std::array<Strategy, 5> kAllStrategies = {
    Strategy::kBaseline, Strategy::kNirap, Strategy::kIpb, Strategy::kEwrd, Strategy::kTwrd};

std::string_view strategy_name(Strategy strategy);
Strategy parse_strategy(std::string_view name);  // throws ValidationError

struct SessionConfig {
  double fps = 25.0;
  int window_frames = 0;  // 0: one GOP
  double trigger_threshold = 0.7;
  // 0 sizes the buffer to what the link delivers in one window (never less
  // than the largest packet).
  std::int64_t buffer_capacity_bytes = 0;
  TileGrid grid{};
  ViewportSpec viewport{};
  // Tiles of at least this class at the true viewpoint count as viewport tiles.
  int viewport_min_class = 3;
  // Viewport loss over viewport packets instead of over all packets.
  bool viewport_loss_over_viewport_packets = false;
  // Trajectory samples handed to the predictor.
  int history_samples = kSamplesPerSecond;
  ScheduleOptions schedule{};

  void validate() const;
};

struct WindowRecord {
  int index = 0;
  int first_frame = 0;
  int frames = 0;
  std::int64_t budget_bytes = 0;
  std::int64_t capacity_bytes = 0;
  std::int64_t offered_bytes = 0;
  std::int64_t transmitted_bytes = 0;
  int offered_packets = 0;
  int transmitted_packets = 0;
  int dropped_packets = 0;
  bool triggered = false;
  // The mandatory packets did not fit; rate-distortion strategies could drop whole tiles.
  bool degraded = false;
};

struct MetricsReport {
  // Normalized so that keeping only frame 0 of every tile scores 100.
  double total_distortion = 0.0;
  double viewport_distortion = 0.0;
  double total_packet_loss_pct = 0.0;
  double viewport_packet_loss_pct = 0.0;
  double viewport_bandwidth_consumption_pct = 0.0;

  double raw_total_distortion = 0.0;
  double raw_viewport_distortion = 0.0;
  double reference_total_distortion = 0.0;
  double reference_viewport_distortion = 0.0;
  int total_packets = 0;
  int dropped_packets = 0;
  int viewport_packets = 0;
  int dropped_viewport_packets = 0;
  std::int64_t transmitted_bytes = 0;
  std::int64_t transmitted_viewport_bytes = 0;
  std::vector<WindowRecord> windows;
};

inline constexpr std::array<std::string_view, 5> kMetricNames = {
    "total_distortion", "viewport_distortion", "total_packet_loss_pct",
    "viewport_packet_loss_pct", "viewport_bandwidth_consumption_pct"};

std::array<double, 5> metric_values(const MetricsReport& report);

// [tile][frame] -> frame shows that tile inside the viewer's viewport.
using ViewportMask = std::vector<std::vector<bool>>;

// Classifies tiles at the true viewpoint nearest each frame's timestamp.
ViewportMask viewport_mask(const VideoSegment& video, const Trajectory& truth,
                           const SessionConfig& config);

MetricsReport compute_metrics(const VideoSegment& video, const TransmissionSet& kept,
                              const ViewportMask& viewport,
                              bool loss_over_viewport_packets = false);

MetricsReport run_session(const VideoSegment& video, const Predictor& predictor,
                          Strategy strategy, const BandwidthTrace& trace,
                          const Trajectory& truth, const SessionConfig& config);

// Maps a nominal link sweep onto a corpus: 0 lands on the rate of the I
// frames (which the scheduler must always carry) and top_mbps on the full
// stream rate.
struct CorpusRates {
  double intra_mbps = 0.0;
  double full_mbps = 0.0;
};
CorpusRates corpus_rates(const VideoSegment& video, double fps);
double scaled_to_corpus(double nominal_mbps, const CorpusRates& rates, double top_mbps = 30.0);

struct SessionInput {
  std::shared_ptr<const VideoSegment> video;
  Trajectory truth;
  std::shared_ptr<const Predictor> predictor;
};

struct Scenario {
  std::string label;
  BandwidthTrace trace;
  double bandwidth_mbps = 0.0;  // 0 for recorded traces
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
};

struct ComparisonRow {
  std::string scenario;
  double bandwidth_mbps = 0.0;
  Strategy strategy = Strategy::kBaseline;
  int runs = 0;
  std::array<MetricSummary, 5> metrics{};
};

// Runs every strategy on every input under every scenario. Rows are ordered
// by scenario, then strategy. stddev is the sample deviation (0 for one run).
std::vector<ComparisonRow> compare_strategies(std::span<const SessionInput> inputs,
                                              std::span<const Scenario> scenarios,
                                              const SessionConfig& config);

// Columns: scenario,bandwidth_mbps,strategy,metric,mean,std,runs
void write_comparison_csv(std::span<const ComparisonRow> rows, std::ostream& out);

}  // namespace tilesched
