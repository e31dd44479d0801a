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

// Viewpoint trajectories, predictions, and predictor evaluation.
//
// Trajectory file:  `t_ms x y z` per line (unit vectors).
// Prediction file:  `t_ms yaw pitch probability` per line, yaw/pitch in
//                   radians, probability in (0, 1]. A blank line ends one
//                   prediction and starts the next; '#' lines are comments.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "tilesched/viewport.hpp"

namespace tilesched {

inline constexpr int kSamplesPerSecond = 5;
inline constexpr std::int64_t kSamplePeriodMs = 1000 / kSamplesPerSecond;

struct TrajectorySample {
  std::int64_t t_ms = 0;
  Viewpoint view;
  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TrajectorySample> samples);  // validates

  const std::vector<TrajectorySample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  const TrajectorySample& back() const { return samples_.back(); }

  // Sample nearest to t_ms (earlier one on ties). Requires a non-empty trajectory.
  const TrajectorySample& nearest(std::int64_t t_ms) const;
  // Samples with t_ms <= until_ms.
  Trajectory history(std::int64_t until_ms) const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<TrajectorySample> samples_;
};

struct PredictedPoint {
  std::int64_t t_ms = 0;
  Viewpoint view;
  double probability = 1.0;
};

struct Prediction {
  std::vector<PredictedPoint> points;

  double horizon_seconds() const {
    return static_cast<double>(points.size()) / kSamplesPerSecond;
  }
  // Point nearest to t_ms. Requires a non-empty prediction.
  const PredictedPoint& nearest(std::int64_t t_ms) const;
  void validate() const;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  // Points at history.back().t_ms + k * kSamplePeriodMs for k = 1..horizon samples.
  virtual Prediction predict(const Trajectory& history, int horizon_samples) const = 0;
};

// Repeats the last observed viewpoint.
class LastPositionPredictor : public Predictor {
 public:
  explicit LastPositionPredictor(double probability = 1.0);
  Prediction predict(const Trajectory& history, int horizon_samples) const override;

 private:
  double probability_;
};

// Looks up the future of a known trajectory; stands in for an accurate model.
class GroundTruthPredictor : public Predictor {
 public:
  GroundTruthPredictor(Trajectory truth, double probability);
  Prediction predict(const Trajectory& history, int horizon_samples) const override;

 private:
  Trajectory truth_;
  double probability_;
};

// Serves predictions read from a file: the prediction whose first point
// follows the history's last timestamp most closely.
class PrecomputedPredictor : public Predictor {
 public:
  explicit PrecomputedPredictor(std::vector<Prediction> predictions);
  Prediction predict(const Trajectory& history, int horizon_samples) const override;

 private:
  std::vector<Prediction> predictions_;
};

Prediction last_position_predict(const Trajectory& history, int horizon_samples,
                                 double probability = 1.0);

TileWeights weights_for_prediction(const PredictedPoint& point, const TileGrid& grid,
                                   const ViewportSpec& spec);

// Mean great-circle error per horizon, horizons given in whole seconds. The
// horizon-h error of one prediction compares its point at issue + h s with the
// ground-truth sample at the same timestamp.
std::vector<double> evaluate_predictor(std::span<const Prediction> predictions,
                                       const Trajectory& truth,
                                       std::span<const int> horizons_seconds);

// Issues one prediction per sample of `truth` once `history_samples` samples
// are known and `horizon_samples` future samples exist.
std::vector<Prediction> predict_stream(const Predictor& predictor, const Trajectory& truth,
                                       int history_samples, int horizon_samples);

std::vector<Prediction> read_predictions(std::istream& in);
void write_predictions(std::span<const Prediction> predictions, std::ostream& out);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
void save_predictions(std::span<const Prediction> predictions, const std::filesystem::path& path);

Trajectory read_trajectory(std::istream& in);
void write_trajectory(const Trajectory& trajectory, std::ostream& out);
Trajectory load_trajectory(const std::filesystem::path& path);
void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);

// Smooth synthetic head motion: a damped random walk pulled toward `anchor`,
// sampled at 5 Hz for duration_ms.
struct TrajectoryConfig {
  std::int64_t duration_ms = 5000;
  std::uint64_t seed = 1;
  double wander_deg_per_s = 25.0;
  double pull = 0.15;
};
Trajectory synth_trajectory(const Viewpoint& anchor, const TrajectoryConfig& config);

// Rotation about the z axis by `step_rad` per sample, starting at `start`.
Trajectory rotating_trajectory(const Viewpoint& start, double step_rad, int samples);

}  // namespace tilesched
