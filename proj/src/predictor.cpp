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

#include "tilesched/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "tilesched/error.hpp"
#include "text_io.hpp"

namespace tilesched {

namespace {

constexpr double kPi = std::numbers::pi;

// Text files carry a few significant digits; anything this close to unit
// length is renormalized on read.
constexpr double kReadUnitTolerance = 1e-3;

Viewpoint normalized(const Viewpoint& v) {
  const double n = v.norm();
  return {v.x / n, v.y / n, v.z / n};
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit_draw(rng);  // (0, 1]
  const double u2 = unit_draw(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace

Trajectory::Trajectory(std::vector<TrajectorySample> samples) : samples_(std::move(samples)) {
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    if (!samples_[k].view.is_unit(1e-9)) {
      throw ValidationError("trajectory sample " + std::to_string(k) + " is not a unit vector");
    }
    if (k > 0 && samples_[k].t_ms <= samples_[k - 1].t_ms) {
      throw ValidationError("trajectory timestamps must be strictly increasing (sample " +
                            std::to_string(k) + ")");
    }
  }
}

const TrajectorySample& Trajectory::nearest(std::int64_t t_ms) const {
  if (samples_.empty()) throw ValidationError("empty trajectory");
  auto it = std::lower_bound(samples_.begin(), samples_.end(), t_ms,
                             [](const TrajectorySample& s, std::int64_t t) { return s.t_ms < t; });
  if (it == samples_.end()) return samples_.back();
  if (it == samples_.begin()) return *it;
  const auto prev = std::prev(it);
  return (t_ms - prev->t_ms <= it->t_ms - t_ms) ? *prev : *it;
}

Trajectory Trajectory::history(std::int64_t until_ms) const {
  std::vector<TrajectorySample> out;
  for (const auto& s : samples_) {
    if (s.t_ms > until_ms) break;
    out.push_back(s);
  }
  return Trajectory(std::move(out));
}

const PredictedPoint& Prediction::nearest(std::int64_t t_ms) const {
  if (points.empty()) throw ValidationError("empty prediction");
  const PredictedPoint* best = &points.front();
  for (const auto& p : points) {
    if (std::llabs(p.t_ms - t_ms) < std::llabs(best->t_ms - t_ms)) best = &p;
  }
  return *best;
}

void Prediction::validate() const {
  if (points.empty()) throw ValidationError("prediction has no points");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    if (!(p.probability > 0.0 && p.probability <= 1.0)) {
      throw ValidationError("prediction probability must be in (0, 1], got " +
                            text::format_double(p.probability));
    }
    if (!p.view.is_unit(1e-9)) throw ValidationError("predicted viewpoint is not a unit vector");
    if (k > 0 && p.t_ms <= points[k - 1].t_ms) {
      throw ValidationError("prediction timestamps must be strictly increasing");
    }
  }
}

Prediction last_position_predict(const Trajectory& history, int horizon_samples,
                                 double probability) {
  if (history.empty()) throw ValidationError("last-position prediction needs a history");
  if (horizon_samples <= 0) throw ValidationError("horizon must be positive");
  Prediction out;
  const auto& last = history.back();
  for (int k = 1; k <= horizon_samples; ++k) {
    out.points.push_back({last.t_ms + k * kSamplePeriodMs, last.view, probability});
  }
  out.validate();
  return out;
}

LastPositionPredictor::LastPositionPredictor(double probability) : probability_(probability) {
  if (!(probability > 0.0 && probability <= 1.0)) {
    throw ValidationError("probability must be in (0, 1]");
  }
}

Prediction LastPositionPredictor::predict(const Trajectory& history, int horizon_samples) const {
  return last_position_predict(history, horizon_samples, probability_);
}

GroundTruthPredictor::GroundTruthPredictor(Trajectory truth, double probability)
    : truth_(std::move(truth)), probability_(probability) {
  if (truth_.empty()) throw ValidationError("ground-truth predictor needs a trajectory");
  if (!(probability > 0.0 && probability <= 1.0)) {
    throw ValidationError("probability must be in (0, 1]");
  }
}

Prediction GroundTruthPredictor::predict(const Trajectory& history, int horizon_samples) const {
  if (history.empty()) throw ValidationError("prediction needs a history");
  if (horizon_samples <= 0) throw ValidationError("horizon must be positive");
  Prediction out;
  const std::int64_t issued = history.back().t_ms;
  for (int k = 1; k <= horizon_samples; ++k) {
    const std::int64_t t = issued + k * kSamplePeriodMs;
    out.points.push_back({t, truth_.nearest(t).view, probability_});
  }
  return out;
}

PrecomputedPredictor::PrecomputedPredictor(std::vector<Prediction> predictions)
    : predictions_(std::move(predictions)) {
  for (const auto& p : predictions_) p.validate();
  std::stable_sort(predictions_.begin(), predictions_.end(),
                   [](const Prediction& a, const Prediction& b) {
                     return a.points.front().t_ms < b.points.front().t_ms;
                   });
}

Prediction PrecomputedPredictor::predict(const Trajectory& history, int horizon_samples) const {
  if (history.empty()) throw ValidationError("prediction needs a history");
  const std::int64_t issued = history.back().t_ms;
  // The earliest prediction that starts after the history ends.
  for (const auto& p : predictions_) {
    if (p.points.front().t_ms <= issued) continue;
    Prediction out = p;
    if (horizon_samples > 0 && static_cast<int>(out.points.size()) > horizon_samples) {
      out.points.resize(horizon_samples);
    }
    return out;
  }
  throw ValidationError("no stored prediction starts after t=" + std::to_string(issued) + " ms");
}

TileWeights weights_for_prediction(const PredictedPoint& point, const TileGrid& grid,
                                   const ViewportSpec& spec) {
  return weights_for_prediction(point.view, point.probability, grid, spec);
}

std::vector<double> evaluate_predictor(std::span<const Prediction> predictions,
                                       const Trajectory& truth,
                                       std::span<const int> horizons_seconds) {
  if (truth.empty()) throw ValidationError("evaluation needs a ground-truth trajectory");
  std::vector<double> out;
  for (int h : horizons_seconds) {
    if (h <= 0) throw ValidationError("horizons must be positive");
    const std::size_t k = static_cast<std::size_t>(h) * kSamplesPerSecond;
    double sum = 0.0;
    int count = 0;
    for (const auto& p : predictions) {
      if (p.points.size() < k) continue;
      const auto& point = p.points[k - 1];
      // Skip targets the ground truth does not reach.
      if (point.t_ms > truth.back().t_ms + kSamplePeriodMs / 2) continue;
      sum += great_circle_distance(point.view, truth.nearest(point.t_ms).view);
      ++count;
    }
    if (count == 0) {
      throw ValidationError("no prediction reaches the " + std::to_string(h) + " s horizon");
    }
    out.push_back(sum / count);
  }
  return out;
}

std::vector<Prediction> predict_stream(const Predictor& predictor, const Trajectory& truth,
                                       int history_samples, int horizon_samples) {
  if (history_samples <= 0) throw ValidationError("history length must be positive");
  std::vector<Prediction> out;
  const auto& s = truth.samples();
  for (std::size_t i = history_samples - 1; i < s.size(); ++i) {
    std::vector<TrajectorySample> window(s.begin() + (i + 1 - history_samples), s.begin() + i + 1);
    out.push_back(predictor.predict(Trajectory(std::move(window)), horizon_samples));
  }
  return out;
}

std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> out;
  Prediction current;
  const auto flush = [&] {
    if (!current.points.empty()) out.push_back(std::move(current));
    current = Prediction{};
  };
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto f = text::fields(text::strip_comment(raw));
    if (f.empty()) {
      // A blank line ends a prediction; comment-only lines do not.
      if (text::fields(raw).empty()) flush();
      continue;
    }
    if (f.size() != 4) {
      throw ParseError("expected 't_ms yaw pitch probability', got " + std::to_string(f.size()) +
                           " fields",
                       line);
    }
    PredictedPoint p;
    p.t_ms = text::parse_number<std::int64_t>(f[0], line, "timestamp");
    const double yaw = text::parse_number<double>(f[1], line, "yaw");
    const double pitch = text::parse_number<double>(f[2], line, "pitch");
    p.probability = text::parse_number<double>(f[3], line, "probability");
    if (!std::isfinite(yaw) || !std::isfinite(pitch) || std::abs(pitch) > kPi / 2 + 1e-9) {
      throw ParseError("yaw/pitch out of range", line);
    }
    if (!(p.probability > 0.0 && p.probability <= 1.0)) {
      throw ValidationError("line " + std::to_string(line) +
                            ": probability must be in (0, 1], got " + std::string(f[3]));
    }
    p.view = Viewpoint::from_yaw_pitch(yaw, pitch);
    if (!current.points.empty() && p.t_ms <= current.points.back().t_ms) flush();
    current.points.push_back(p);
  }
  flush();
  for (const auto& p : out) p.validate();
  return out;
}

void write_predictions(std::span<const Prediction> predictions, std::ostream& out) {
  out << "# t_ms yaw_rad pitch_rad probability\n";
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    if (k > 0) out << '\n';
    for (const auto& p : predictions[k].points) {
      out << p.t_ms << ' ' << text::format_double(p.view.yaw()) << ' '
          << text::format_double(p.view.pitch()) << ' ' << text::format_double(p.probability)
          << '\n';
    }
  }
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open prediction file " + path.string());
  return read_predictions(in);
}

void save_predictions(std::span<const Prediction> predictions, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write prediction file " + path.string());
  write_predictions(predictions, out);
}

Trajectory read_trajectory(std::istream& in) {
  std::vector<TrajectorySample> samples;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto f = text::fields(text::strip_comment(raw));
    if (f.empty()) continue;
    if (f.size() != 4) throw ParseError("expected 't_ms x y z'", line);
    TrajectorySample s;
    s.t_ms = text::parse_number<std::int64_t>(f[0], line, "timestamp");
    s.view = {text::parse_number<double>(f[1], line, "x"), text::parse_number<double>(f[2], line, "y"),
              text::parse_number<double>(f[3], line, "z")};
    if (!s.view.is_unit(kReadUnitTolerance)) throw ParseError("viewpoint is not a unit vector", line);
    s.view = normalized(s.view);
    if (!samples.empty() && s.t_ms <= samples.back().t_ms) {
      throw ParseError("timestamps must be strictly increasing", line);
    }
    samples.push_back(s);
  }
  return Trajectory(std::move(samples));
}

void write_trajectory(const Trajectory& trajectory, std::ostream& out) {
  out << "# t_ms x y z\n";
  for (const auto& s : trajectory.samples()) {
    out << s.t_ms << ' ' << text::format_double(s.view.x) << ' ' << text::format_double(s.view.y)
        << ' ' << text::format_double(s.view.z) << '\n';
  }
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trajectory file " + path.string());
  return read_trajectory(in);
}

void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write trajectory file " + path.string());
  write_trajectory(trajectory, out);
}

Trajectory synth_trajectory(const Viewpoint& anchor, const TrajectoryConfig& config) {
  if (config.duration_ms < 0) throw ValidationError("trajectory duration must be non-negative");
  if (!(config.wander_deg_per_s >= 0.0)) throw ValidationError("wander must be non-negative");
  if (!(config.pull >= 0.0 && config.pull <= 1.0)) throw ValidationError("pull must be in [0, 1]");
  if (!anchor.is_unit()) throw ValidationError("anchor must be a unit vector");

  std::mt19937_64 rng(config.seed ^ 0x7a3c1f0b9d2e4c61ULL);
  const double step = config.wander_deg_per_s * kPi / 180.0 / kSamplesPerSecond;
  const double max_pitch = 80.0 * kPi / 180.0;
  double dyaw = 0.0;
  double dpitch = 0.0;
  std::vector<TrajectorySample> samples;
  for (std::int64_t t = 0; t <= config.duration_ms; t += kSamplePeriodMs) {
    const double pitch = std::clamp(anchor.pitch() + dpitch, -max_pitch, max_pitch);
    samples.push_back({t, Viewpoint::from_yaw_pitch(anchor.yaw() + dyaw, pitch)});
    // Random walk pulled back toward the anchor.
    dyaw = dyaw * (1.0 - config.pull) + step * gaussian(rng);
    dpitch = dpitch * (1.0 - config.pull) + 0.5 * step * gaussian(rng);
  }
  return Trajectory(std::move(samples));
}

Trajectory rotating_trajectory(const Viewpoint& start, double step_rad, int samples) {
  if (!start.is_unit()) throw ValidationError("start must be a unit vector");
  if (samples < 0) throw ValidationError("sample count must be non-negative");
  // Rotate along a great circle through start.
  Viewpoint ref = std::abs(start.z) < 0.9 ? Viewpoint{0, 0, 1} : Viewpoint{1, 0, 0};
  const double d = ref.x * start.x + ref.y * start.y + ref.z * start.z;
  const Viewpoint w = normalized({ref.x - d * start.x, ref.y - d * start.y, ref.z - d * start.z});
  std::vector<TrajectorySample> out;
  for (int k = 0; k < samples; ++k) {
    const double a = k * step_rad;
    const double c = std::cos(a), s = std::sin(a);
    out.push_back({k * kSamplePeriodMs,
                   normalized({c * start.x + s * w.x, c * start.y + s * w.y, c * start.z + s * w.z})});
  }
  return Trajectory(std::move(out));
}

}  // namespace tilesched
