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

// Command-line harness: corpus synthesis, one-shot scheduling, sessions,
// strategy comparison and predictor evaluation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tilesched/baselines.hpp"
#include "tilesched/error.hpp"
#include "tilesched/netsim.hpp"
#include "tilesched/predictor.hpp"
#include "tilesched/scheduler.hpp"
#include "tilesched/segment_io.hpp"
#include "tilesched/synth.hpp"
#include "tilesched/trace.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tilesched;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string default_output_root() {
  const char* env = std::getenv("TILESCHED_OUTPUT_ROOT");
  return env != nullptr && *env != '\0' ? env : "tilesched-out";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Output directory keyed by the resolved configuration, so reruns with the
// same inputs land in the same place.
fs::path output_dir(const std::string& root, const std::string& command, const json& config) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(config.dump())));
  fs::path dir = fs::path(root) / (command + "-" + hex);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

// ---- shared option blocks ----

struct VideoOptions {
  std::string segment;
  SynthConfig synth;
  std::vector<CLI::Option*> synth_flags;

  void add(CLI::App* app) {
    app->add_option("--segment", segment, "Segment file (instead of a synthetic corpus)")
        ->check(CLI::ExistingFile);
    synth_flags = {
        app->add_option("--tiles", synth.tiles, "Synthetic corpus: tile count")->capture_default_str(),
        app->add_option("--frames", synth.frames, "Synthetic corpus: frames per tile")
            ->capture_default_str(),
        app->add_option("--gop", synth.gop_length, "Synthetic corpus: GOP length")
            ->capture_default_str(),
        app->add_option("--pattern", synth.gop_pattern,
                        "Synthetic corpus: frame types after each I frame, repeated")
            ->capture_default_str(),
        app->add_option("--decay", synth.decay, "Synthetic corpus: distortion growth rate")
            ->capture_default_str(),
        app->add_option("--saliency-boost", synth.saliency_boost,
                        "Synthetic corpus: extra motion near the salient region")
            ->capture_default_str(),
    };
  }

  bool synthetic() const { return segment.empty(); }

  void check() const {
    if (synthetic()) return;
    for (auto* opt : synth_flags) {
      if (opt->count() > 0) {
        throw CLI::ValidationError(opt->get_name() + " conflicts with --segment: pick one video source");
      }
    }
  }

  VideoSegment load(std::uint64_t seed) const {
    if (!synthetic()) return load_segment(segment);
    SynthConfig c = synth;
    c.seed = seed;
    return synth_video(c);
  }

  json describe() const {
    if (!synthetic()) return {{"segment", segment}};
    return {{"synthetic",
             {{"tiles", synth.tiles},
              {"frames", synth.frames},
              {"gop", synth.gop_length},
              {"pattern", synth.gop_pattern},
              {"decay", synth.decay},
              {"saliency_boost", synth.saliency_boost}}}};
  }
};

struct GeometryOptions {
  TileGrid grid{};
  ViewportSpec viewport{};

  void add(CLI::App* app) {
    app->add_option("--grid-rows", grid.rows, "Tile grid rows")->capture_default_str();
    app->add_option("--grid-cols", grid.cols, "Tile grid columns")->capture_default_str();
    app->add_option("--fov-h", viewport.horizontal_fov_deg, "Horizontal field of view, degrees")
        ->capture_default_str();
    app->add_option("--fov-v", viewport.vertical_fov_deg, "Vertical field of view, degrees")
        ->capture_default_str();
  }

  json describe() const {
    return {{"grid_rows", grid.rows},
            {"grid_cols", grid.cols},
            {"fov_h_deg", viewport.horizontal_fov_deg},
            {"fov_v_deg", viewport.vertical_fov_deg}};
  }
};

struct PredictorOptions {
  std::string kind = "last";
  std::string prediction_file;
  double probability = 1.0;

  void add(CLI::App* app, bool allow_truth) {
    std::vector<std::string> kinds = {"last", "file"};
    if (allow_truth) kinds.push_back("truth");
    app->add_option("--predictor", kind,
                    allow_truth ? "Viewpoint predictor: last, truth or file"
                                : "Viewpoint predictor: last or file")
        ->check(CLI::IsMember(kinds))
        ->capture_default_str();
    app->add_option("--prediction-file", prediction_file, "Prediction records for --predictor file")
        ->check(CLI::ExistingFile);
    app->add_option("--probability", probability,
                    "Confidence attached to last/truth predictions, in (0, 1]")
        ->capture_default_str();
  }

  void check() const {
    if (kind == "file" && prediction_file.empty()) {
      throw CLI::ValidationError("--predictor file needs --prediction-file");
    }
    if (kind != "file" && !prediction_file.empty()) {
      throw CLI::ValidationError("--prediction-file is only used with --predictor file");
    }
    if (!(probability > 0.0 && probability <= 1.0)) {
      throw CLI::ValidationError("--probability must be in (0, 1]");
    }
  }

  std::shared_ptr<const Predictor> make(const Trajectory& truth) const {
    if (kind == "file") return std::make_shared<PrecomputedPredictor>(load_predictions(prediction_file));
    if (kind == "truth") return std::make_shared<GroundTruthPredictor>(truth, probability);
    return std::make_shared<LastPositionPredictor>(probability);
  }

  json describe() const {
    json j = {{"kind", kind}};
    if (kind == "file") {
      j["file"] = prediction_file;
    } else {
      j["probability"] = probability;
    }
    return j;
  }
};

struct TrajectoryOptions {
  std::string path;
  std::int64_t duration_ms = 0;  // 0: as long as the segment
  double wander_deg_per_s = TrajectoryConfig{}.wander_deg_per_s;

  void add(CLI::App* app) {
    app->add_option("--trajectory", path, "Ground-truth head trajectory (t_ms x y z)")
        ->check(CLI::ExistingFile);
    app->add_option("--wander", wander_deg_per_s,
                    "Synthetic trajectory: random-walk speed, degrees per second")
        ->capture_default_str();
  }

  // Synthetic trajectories wander around the corpus' salient region.
  Trajectory load(const VideoOptions& video, const VideoSegment& segment, std::uint64_t seed,
                  double fps) const {
    if (!path.empty()) return load_trajectory(path);
    TrajectoryConfig c;
    c.seed = seed;
    c.wander_deg_per_s = wander_deg_per_s;
    c.duration_ms = std::llround(segment.frames_per_tile * 1000.0 / fps);
    Viewpoint anchor{1.0, 0.0, 0.0};
    if (video.synthetic()) {
      SynthConfig s = video.synth;
      s.seed = seed;
      anchor = salient_direction(s);
    }
    return synth_trajectory(anchor, c);
  }

  json describe() const {
    if (!path.empty()) return {{"file", path}};
    return {{"synthetic", {{"wander_deg_per_s", wander_deg_per_s}}}};
  }
};

struct SessionOptions {
  SessionConfig config;
  std::string loss_denominator = "total";

  void add(CLI::App* app) {
    app->add_option("--fps", config.fps, "Frame rate")->capture_default_str();
    app->add_option("--window-frames", config.window_frames,
                    "Frames per scheduling window (0: one GOP)")
        ->capture_default_str();
    app->add_option("--threshold", config.trigger_threshold,
                    "Queue fill fraction that triggers the scheduler")
        ->capture_default_str();
    app->add_option("--buffer-bytes", config.buffer_capacity_bytes,
                    "Node buffer size (0: one window of link capacity)")
        ->capture_default_str();
    app->add_option("--viewport-min-class", config.viewport_min_class,
                    "Tiles of at least this overlap class count as viewport")
        ->capture_default_str();
    app->add_option("--viewport-loss-denominator", loss_denominator,
                    "Viewport loss relative to all packets or to viewport packets")
        ->check(CLI::IsMember({"total", "viewport"}))
        ->capture_default_str();
    app->add_option("--history-samples", config.history_samples,
                    "Trajectory samples handed to the predictor")
        ->capture_default_str();
    app->add_option("--trellis-quantum", config.schedule.trellis.rate_quantum,
                    "Trellis rate bucket in bytes (1: exact)")
        ->capture_default_str();
    app->add_option("--trellis-levels", config.schedule.trellis.max_rate_levels,
                    "Most rate levels per trellis frontier; larger budgets coarsen the bucket (0: no cap)")
        ->capture_default_str();
    app->add_option("--allocator-quantum", config.schedule.allocator.rate_quantum,
                    "Cross-tile allocation rate quantum in bytes")
        ->capture_default_str();
  }

  SessionConfig resolve(const GeometryOptions& geo) const {
    SessionConfig c = config;
    c.grid = geo.grid;
    c.viewport = geo.viewport;
    c.viewport_loss_over_viewport_packets = loss_denominator == "viewport";
    c.validate();
    return c;
  }

  json describe() const {
    return {{"fps", config.fps},
            {"window_frames", config.window_frames},
            {"threshold", config.trigger_threshold},
            {"buffer_bytes", config.buffer_capacity_bytes},
            {"viewport_min_class", config.viewport_min_class},
            {"viewport_loss_denominator", loss_denominator},
            {"history_samples", config.history_samples},
            {"trellis_quantum", config.schedule.trellis.rate_quantum},
            {"trellis_levels", config.schedule.trellis.max_rate_levels},
            {"allocator_quantum", config.schedule.allocator.rate_quantum}};
  }
};

struct TraceOptions {
  std::optional<double> bandwidth_mbps;
  std::string path;
  double scale = 1.0;

  void add(CLI::App* app) {
    auto* bw = app->add_option("--bandwidth", bandwidth_mbps, "Constant link rate, Mbps");
    auto* tr = app->add_option("--trace", path, "Bandwidth trace file (time_ms throughput_bps)")
                   ->check(CLI::ExistingFile);
    bw->excludes(tr);
    app->add_option("--trace-scale", scale, "Multiply the trace throughput")->capture_default_str();
  }

  BandwidthTrace load(std::int64_t duration_ms) const {
    if (!path.empty()) return load_lte_trace(path).scaled(scale);
    if (!bandwidth_mbps) throw CLI::ValidationError("give --bandwidth or --trace");
    return constant_trace(*bandwidth_mbps, duration_ms).scaled(scale);
  }

  json describe() const {
    json j = path.empty() ? json{{"bandwidth_mbps", bandwidth_mbps.value_or(0.0)}} : json{{"file", path}};
    j["scale"] = scale;
    return j;
  }
};

std::int64_t session_ms(const VideoSegment& video, double fps) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                       std::ceil(video.frames_per_tile * 1000.0 / fps)));
}

json metrics_json(const MetricsReport& r) {
  json m;
  const auto values = metric_values(r);
  for (std::size_t k = 0; k < kMetricNames.size(); ++k) m[std::string(kMetricNames[k])] = values[k];
  return m;
}

json report_json(const MetricsReport& r) {
  json j;
  j["metrics"] = metrics_json(r);
  j["raw"] = {{"total_distortion", r.raw_total_distortion},
              {"viewport_distortion", r.raw_viewport_distortion},
              {"reference_total_distortion", r.reference_total_distortion},
              {"reference_viewport_distortion", r.reference_viewport_distortion},
              {"total_packets", r.total_packets},
              {"dropped_packets", r.dropped_packets},
              {"viewport_packets", r.viewport_packets},
              {"dropped_viewport_packets", r.dropped_viewport_packets},
              {"transmitted_bytes", r.transmitted_bytes},
              {"transmitted_viewport_bytes", r.transmitted_viewport_bytes}};
  int offered = 0, sent = 0, dropped = 0;
  bool budget_ok = true;
  json windows = json::array();
  for (const auto& w : r.windows) {
    offered += w.offered_packets;
    sent += w.transmitted_packets;
    dropped += w.dropped_packets;
    budget_ok = budget_ok && w.transmitted_bytes <= w.budget_bytes;
    windows.push_back({{"index", w.index},
                       {"first_frame", w.first_frame},
                       {"frames", w.frames},
                       {"budget_bytes", w.budget_bytes},
                       {"capacity_bytes", w.capacity_bytes},
                       {"offered_bytes", w.offered_bytes},
                       {"transmitted_bytes", w.transmitted_bytes},
                       {"offered_packets", w.offered_packets},
                       {"transmitted_packets", w.transmitted_packets},
                       {"dropped_packets", w.dropped_packets},
                       {"triggered", w.triggered},
                       {"degraded", w.degraded}});
  }
  j["conservation"] = {{"offered_packets", offered},
                       {"transmitted_packets", sent},
                       {"dropped_packets", dropped},
                       {"holds", offered == sent + dropped && offered == r.total_packets},
                       {"budget_respected", budget_ok}};
  j["windows"] = std::move(windows);
  return j;
}

// ---- commands ----

struct SynthCommand {
  VideoOptions video;
  std::uint64_t seed = 1;
  double fps = 25.0;
  double wander = TrajectoryConfig{}.wander_deg_per_s;
  std::string out_root = default_output_root();

  void add(CLI::App& parent) {
    auto* app = parent.add_subcommand("synth", "Write a synthetic segment and head trajectory");
    video.add(app);
    app->add_option("--seed", seed, "Corpus seed")->capture_default_str();
    app->add_option("--fps", fps, "Frame rate used to time the trajectory")->capture_default_str();
    app->add_option("--wander", wander, "Trajectory random-walk speed, degrees per second")
        ->capture_default_str();
    app->add_option("--out-dir", out_root, "Output root (env TILESCHED_OUTPUT_ROOT)")
        ->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    if (!video.synthetic()) throw CLI::ValidationError("synth does not take --segment");
    SynthConfig c = video.synth;
    c.seed = seed;
    const VideoSegment seg = synth_video(c);
    TrajectoryConfig tc;
    tc.seed = seed;
    tc.wander_deg_per_s = wander;
    tc.duration_ms = session_ms(seg, fps);
    const Trajectory truth = synth_trajectory(salient_direction(c), tc);

    json config = {{"command", "synth"}, {"seed", seed}, {"fps", fps}, {"video", video.describe()},
                   {"wander_deg_per_s", wander}};
    const fs::path dir = output_dir(out_root, "synth", config);
    save_segment(seg, dir / "segment.txt");
    save_trajectory(truth, dir / "trajectory.txt");
    const Viewpoint s = salient_direction(c);
    config["salient_yaw_deg"] = s.yaw() / kDegToRad;
    config["salient_pitch_deg"] = s.pitch() / kDegToRad;
    config["total_bytes"] = seg.total_bytes();
    config["mean_mbps"] = seg.total_bytes() * 8.0 / (seg.frames_per_tile / fps) / 1e6;
    write_json(dir / "config.json", config);
    std::cout << "segment: " << (dir / "segment.txt").string() << '\n'
              << "trajectory: " << (dir / "trajectory.txt").string() << '\n'
              << "mean rate: " << config["mean_mbps"].get<double>() << " Mbps\n";
  }
};

struct ScheduleCommand {
  VideoOptions video;
  GeometryOptions geo;
  std::uint64_t seed = 1;
  std::int64_t budget = 0;
  std::string strategy = "twrd";
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double probability = 1.0;
  std::int64_t trellis_quantum = 1;
  std::int64_t trellis_levels = TrellisOptions{}.max_rate_levels;
  std::int64_t allocator_quantum = 188;
  std::string out_root = default_output_root();

  void add(CLI::App& parent) {
    auto* app = parent.add_subcommand("schedule", "Choose the packets to keep under a byte budget");
    video.add(app);
    geo.add(app);
    app->add_option("--seed", seed, "Synthetic corpus seed")->capture_default_str();
    app->add_option("--budget", budget, "Byte budget")->required();
    app->add_option("--strategy", strategy, "baseline, nirap, ipb, ewrd or twrd")
        ->capture_default_str();
    app->add_option("--yaw", yaw_deg, "Predicted viewpoint yaw, degrees")->capture_default_str();
    app->add_option("--pitch", pitch_deg, "Predicted viewpoint pitch, degrees")->capture_default_str();
    app->add_option("--probability", probability, "Prediction confidence in (0, 1]")
        ->capture_default_str();
    app->add_option("--trellis-quantum", trellis_quantum, "Trellis rate bucket in bytes (1: exact)")
        ->capture_default_str();
    app->add_option("--trellis-levels", trellis_levels,
                    "Most rate levels per trellis frontier (0: no cap)")
        ->capture_default_str();
    app->add_option("--allocator-quantum", allocator_quantum, "Cross-tile rate quantum in bytes")
        ->capture_default_str();
    app->add_option("--out-dir", out_root, "Output root (env TILESCHED_OUTPUT_ROOT)")
        ->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    video.check();
    const Strategy s = parse_strategy(strategy);
    const VideoSegment seg = video.load(seed);
    ScheduleOptions opts;
    opts.trellis.rate_quantum = trellis_quantum;
    opts.trellis.max_rate_levels = trellis_levels;
    opts.allocator.rate_quantum = allocator_quantum;

    std::vector<double> lambda(seg.tile_count(), 1.0);
    std::vector<int> classes;
    if (s == Strategy::kTwrd) {
      geo.grid.validate();
      if (geo.grid.tile_count() != seg.tile_count()) {
        throw ValidationError("grid has " + std::to_string(geo.grid.tile_count()) +
                              " tiles, segment has " + std::to_string(seg.tile_count()));
      }
      const TileWeights w = weights_for_prediction(
          Viewpoint::from_yaw_pitch(yaw_deg * kDegToRad, pitch_deg * kDegToRad), probability,
          geo.grid, geo.viewport);
      lambda = w.lambda;
      classes = w.tile_class;
    }
    const std::vector<PacketRef> queue = arrival_order(seg);
    Schedule result;
    switch (s) {
      case Strategy::kBaseline: result = tail_drop(seg, queue, budget); break;
      case Strategy::kNirap: result = nirap_drop(seg, queue, budget); break;
      case Strategy::kIpb: result = ipb_drop(seg, queue, budget); break;
      case Strategy::kEwrd: result = ewrd_schedule(seg, budget, opts); break;
      case Strategy::kTwrd: result = schedule(seg, lambda, budget, opts); break;
    }

    json config = {{"command", "schedule"}, {"seed", seed},       {"video", video.describe()},
                   {"budget_bytes", budget},  {"strategy", strategy}, {"geometry", geo.describe()},
                   {"yaw_deg", yaw_deg},      {"pitch_deg", pitch_deg}, {"probability", probability},
                   {"trellis_quantum", trellis_quantum}, {"trellis_levels", trellis_levels},
                   {"allocator_quantum", allocator_quantum}};
    const fs::path dir = output_dir(out_root, "schedule", config);
    json tiles = json::array();
    std::ofstream csv(dir / "schedule.csv");
    csv << "tile,frame,type,size_bytes,kept\n";
    for (int t = 0; t < seg.tile_count(); ++t) {
      json tile = {{"tile", t}, {"lambda", lambda[t]}, {"kept", result.kept.tile(t)}};
      if (!classes.empty()) tile["class"] = classes[t];
      tiles.push_back(std::move(tile));
      for (int f = 0; f < seg.frames_per_tile; ++f) {
        const Packet& p = seg.packet(t, f);
        csv << t << ',' << f << ',' << frame_type_char(p.type) << ',' << p.size_bytes << ','
            << (result.kept.contains(t, f) ? 1 : 0) << '\n';
      }
    }
    json doc = {{"config", config},
                {"rate_bytes", result.rate_bytes},
                {"weighted_distortion", result.weighted_distortion},
                {"kept_packets", result.kept.packet_count()},
                {"dropped_packets", seg.packet_count() - static_cast<int>(result.kept.packet_count())},
                {"tiles", tiles}};
    write_json(dir / "schedule.json", doc);
    std::cout << strategy << ": kept " << result.kept.packet_count() << "/" << seg.packet_count()
              << " packets, " << result.rate_bytes << " of " << budget << " bytes, distortion "
              << result.weighted_distortion << '\n'
              << "output: " << dir.string() << '\n';
  }
};

struct SimulateCommand {
  VideoOptions video;
  GeometryOptions geo;
  PredictorOptions predictor;
  TrajectoryOptions trajectory;
  SessionOptions session;
  TraceOptions trace;
  std::uint64_t seed = 1;
  std::string strategy = "twrd";
  std::string out_root = default_output_root();

  void add(CLI::App& parent) {
    auto* app = parent.add_subcommand("simulate", "Run one streaming session through the network node");
    video.add(app);
    geo.add(app);
    predictor.add(app, true);
    trajectory.add(app);
    session.add(app);
    trace.add(app);
    app->add_option("--seed", seed, "Corpus and trajectory seed")->capture_default_str();
    app->add_option("--strategy", strategy, "baseline, nirap, ipb, ewrd or twrd")
        ->capture_default_str();
    app->add_option("--out-dir", out_root, "Output root (env TILESCHED_OUTPUT_ROOT)")
        ->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    video.check();
    predictor.check();
    const Strategy s = parse_strategy(strategy);
    const SessionConfig cfg = session.resolve(geo);
    const VideoSegment seg = video.load(seed);
    const Trajectory truth = trajectory.load(video, seg, seed, cfg.fps);
    const auto pred = predictor.make(truth);
    const BandwidthTrace bw = trace.load(session_ms(seg, cfg.fps));
    const MetricsReport report = run_session(seg, *pred, s, bw, truth, cfg);

    json config = {{"command", "simulate"},        {"seed", seed},
                   {"strategy", strategy},         {"video", video.describe()},
                   {"geometry", geo.describe()},   {"predictor", predictor.describe()},
                   {"trajectory", trajectory.describe()}, {"session", session.describe()},
                   {"trace", trace.describe()}};
    const fs::path dir = output_dir(out_root, "simulate", config);
    json doc = report_json(report);
    doc["config"] = config;
    write_json(dir / "report.json", doc);
    std::ofstream csv(dir / "report.csv");
    csv << "strategy,metric,value\n";
    const auto values = metric_values(report);
    for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
      csv << strategy << ',' << kMetricNames[k] << ',' << values[k] << '\n';
      std::cout << kMetricNames[k] << ": " << values[k] << '\n';
    }
    std::cout << "output: " << dir.string() << '\n';
  }
};

struct CompareCommand {
  VideoOptions video;
  GeometryOptions geo;
  PredictorOptions predictor;
  TrajectoryOptions trajectory;
  SessionOptions session;
  int seeds = 5;
  std::uint64_t first_seed = 1;
  std::vector<double> bandwidths = {0.5, 5, 10, 15, 20, 25, 30};
  double bandwidth_scale = 1.0;
  bool corpus_scaled = false;
  std::vector<std::string> traces;
  std::string out_root = default_output_root();

  void add(CLI::App& parent) {
    auto* app = parent.add_subcommand(
        "compare", "Run all five strategies over a bandwidth sweep and/or recorded traces");
    video.add(app);
    geo.add(app);
    predictor.add(app, true);
    trajectory.add(app);
    session.add(app);
    app->add_option("--seeds", seeds, "Number of corpus seeds")->capture_default_str();
    app->add_option("--first-seed", first_seed, "First seed")->capture_default_str();
    app->add_option("--bandwidths", bandwidths, "Constant link rates, Mbps")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--bandwidth-scale", bandwidth_scale,
                    "Multiply every constant rate (to match a corpus' bitrate)")
        ->capture_default_str();
    app->add_flag("--corpus-scaled", corpus_scaled,
                  "Map 0..30 Mbps linearly onto the corpus, from its I-frame rate to its full rate");
    app->add_option("--trace", traces, "Recorded bandwidth traces (scenario per file)")
        ->check(CLI::ExistingFile);
    app->add_option("--out-dir", out_root, "Output root (env TILESCHED_OUTPUT_ROOT)")
        ->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    video.check();
    predictor.check();
    if (seeds <= 0) throw CLI::ValidationError("--seeds must be positive");
    if (!video.synthetic() && trajectory.path.empty() && seeds > 1) {
      std::cerr << "note: a fixed segment varies only the synthetic trajectory across seeds\n";
    }
    const SessionConfig cfg = session.resolve(geo);
    std::vector<SessionInput> inputs;
    std::int64_t duration = 0;
    for (int k = 0; k < seeds; ++k) {
      const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(k);
      auto seg = std::make_shared<const VideoSegment>(video.load(seed));
      Trajectory truth = trajectory.load(video, *seg, seed, cfg.fps);
      auto pred = predictor.make(truth);
      duration = std::max(duration, session_ms(*seg, cfg.fps));
      inputs.push_back({seg, std::move(truth), std::move(pred)});
    }
    CorpusRates rates;
    for (const auto& in : inputs) {
      const CorpusRates r = corpus_rates(*in.video, cfg.fps);
      rates.intra_mbps += r.intra_mbps / inputs.size();
      rates.full_mbps += r.full_mbps / inputs.size();
    }
    std::vector<Scenario> scenarios;
    for (double mbps : bandwidths) {
      std::ostringstream label;
      label << "constant-" << mbps;
      const double link = (corpus_scaled ? scaled_to_corpus(mbps, rates) : mbps) * bandwidth_scale;
      scenarios.push_back({label.str(), constant_trace(link, duration), mbps});
    }
    for (const auto& path : traces) {
      scenarios.push_back({fs::path(path).filename().string(), load_lte_trace(path), 0.0});
    }
    if (scenarios.empty()) throw CLI::ValidationError("no bandwidths or traces to compare");

    const std::vector<ComparisonRow> rows = compare_strategies(inputs, scenarios, cfg);
    json config = {{"command", "compare"},      {"seeds", seeds},
                   {"first_seed", first_seed},  {"bandwidths_mbps", bandwidths},
                   {"bandwidth_scale", bandwidth_scale}, {"corpus_scaled", corpus_scaled},
                   {"traces", traces},
                   {"video", video.describe()}, {"geometry", geo.describe()},
                   {"predictor", predictor.describe()}, {"trajectory", trajectory.describe()},
                   {"session", session.describe()}};
    const fs::path dir = output_dir(out_root, "compare", config);
    {
      std::ofstream csv(dir / "comparison.csv");
      write_comparison_csv(rows, csv);
    }
    json table = json::array();
    for (const auto& row : rows) {
      json metrics;
      for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
        metrics[std::string(kMetricNames[k])] = {{"mean", row.metrics[k].mean},
                                                 {"std", row.metrics[k].stddev}};
      }
      table.push_back({{"scenario", row.scenario},
                       {"bandwidth_mbps", row.bandwidth_mbps},
                       {"strategy", std::string(strategy_name(row.strategy))},
                       {"runs", row.runs},
                       {"metrics", metrics}});
    }
    write_json(dir / "comparison.json", {{"config", config}, {"rows", table}});
    write_comparison_csv(rows, std::cout);
    std::cout << "output: " << dir.string() << '\n';
  }
};

struct EvalPredictorCommand {
  PredictorOptions predictor;
  std::string trajectory_path;
  std::optional<double> rotate_step_deg;
  int samples = 0;
  std::uint64_t seed = 1;
  std::int64_t duration_ms = 60000;
  double wander = TrajectoryConfig{}.wander_deg_per_s;
  int history_samples = kSamplesPerSecond;
  int max_horizon_s = 5;
  std::string out_root = default_output_root();

  void add(CLI::App& parent) {
    auto* app = parent.add_subcommand("eval-predictor",
                                      "Mean great-circle error of a predictor per horizon");
    predictor.add(app, false);
    auto* tr = app->add_option("--trajectory", trajectory_path, "Ground-truth trajectory file")
                   ->check(CLI::ExistingFile);
    auto* rot = app->add_option("--rotate-step-deg", rotate_step_deg,
                                "Use a constant-rate great-circle rotation, degrees per sample");
    tr->excludes(rot);
    app->add_option("--samples", samples, "Samples in a rotating trajectory (0: match duration)");
    app->add_option("--seed", seed, "Synthetic trajectory seed")->capture_default_str();
    app->add_option("--duration-ms", duration_ms, "Synthetic trajectory length")
        ->capture_default_str();
    app->add_option("--wander", wander, "Synthetic trajectory random-walk speed, degrees per second")
        ->capture_default_str();
    app->add_option("--history-samples", history_samples, "Samples handed to the predictor")
        ->capture_default_str();
    app->add_option("--max-horizon", max_horizon_s, "Largest horizon, seconds")
        ->capture_default_str();
    app->add_option("--out-dir", out_root, "Output root (env TILESCHED_OUTPUT_ROOT)")
        ->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    predictor.check();
    if (max_horizon_s <= 0) throw CLI::ValidationError("--max-horizon must be positive");
    Trajectory truth;
    json source;
    if (!trajectory_path.empty()) {
      truth = load_trajectory(trajectory_path);
      source = {{"file", trajectory_path}};
    } else if (rotate_step_deg) {
      const int n = samples > 0 ? samples : static_cast<int>(duration_ms / kSamplePeriodMs) + 1;
      truth = rotating_trajectory(Viewpoint{1, 0, 0}, *rotate_step_deg * kDegToRad, n);
      source = {{"rotating", {{"step_deg", *rotate_step_deg}, {"samples", n}}}};
    } else {
      TrajectoryConfig c;
      c.seed = seed;
      c.duration_ms = duration_ms;
      c.wander_deg_per_s = wander;
      truth = synth_trajectory(Viewpoint{1, 0, 0}, c);
      source = {{"synthetic", {{"seed", seed}, {"duration_ms", duration_ms}, {"wander_deg_per_s", wander}}}};
    }
    const auto pred = predictor.make(truth);
    const std::vector<Prediction> stream =
        predictor.kind == "file"
            ? load_predictions(predictor.prediction_file)
            : predict_stream(*pred, truth, history_samples, max_horizon_s * kSamplesPerSecond);
    std::vector<int> horizons;
    for (int h = 1; h <= max_horizon_s; ++h) horizons.push_back(h);
    const std::vector<double> err = evaluate_predictor(stream, truth, horizons);

    json config = {{"command", "eval-predictor"}, {"predictor", predictor.describe()},
                   {"trajectory", source},         {"history_samples", history_samples},
                   {"max_horizon_s", max_horizon_s}};
    const fs::path dir = output_dir(out_root, "eval-predictor", config);
    std::ofstream csv(dir / "eval.csv");
    csv << "horizon_s,mean_great_circle_rad\n";
    json rows = json::array();
    std::cout << "horizon_s  mean_great_circle_rad\n";
    for (std::size_t k = 0; k < horizons.size(); ++k) {
      csv << horizons[k] << ',' << err[k] << '\n';
      rows.push_back({{"horizon_s", horizons[k]}, {"mean_great_circle_rad", err[k]}});
      std::cout << horizons[k] << "  " << err[k] << '\n';
    }
    write_json(dir / "eval.json", {{"config", config}, {"rows", rows}});
    std::cout << "output: " << dir.string() << '\n';
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tile-weighted rate-distortion packet scheduling for tiled 360-degree video"};
  app.set_config("--config", "", "Read options from a TOML/INI file (flags override it)");
  app.require_subcommand(1);

  SynthCommand synth;
  ScheduleCommand sched;
  SimulateCommand simulate;
  CompareCommand compare;
  EvalPredictorCommand eval;
  synth.add(app);
  sched.add(app);
  simulate.add(app);
  compare.add(app);
  eval.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
