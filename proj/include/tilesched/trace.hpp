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

// Piecewise-constant link throughput. Record k holds from its timestamp to
// the next one; the last record holds for the same span as the one before it
// (1 s for a single-record trace).
//
// File format: `time_ms throughput_bps` per line, whitespace separated,
// '#' starts a comment.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace tilesched {

struct TracePoint {
  std::int64_t time_ms = 0;
  double throughput_bps = 0.0;
  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

class BandwidthTrace {
 public:
  BandwidthTrace() = default;
  explicit BandwidthTrace(std::vector<TracePoint> points);  // validates

  const std::vector<TracePoint>& points() const { return points_; }
  std::int64_t start_ms() const;
  std::int64_t end_ms() const;
  // Bytes deliverable during [begin_ms, end_ms), rounded down.
  std::int64_t bytes_between(double begin_ms, double end_ms) const;
  BandwidthTrace scaled(double factor) const;

  friend bool operator==(const BandwidthTrace&, const BandwidthTrace&) = default;

 private:
  std::vector<TracePoint> points_;
};

inline constexpr std::int64_t kDefaultTraceStepMs = 1000;

// Flat trace in 1 s records covering at least `duration_ms`.
BandwidthTrace constant_trace(double mbps, std::int64_t duration_ms);

BandwidthTrace read_trace(std::istream& in);
BandwidthTrace load_lte_trace(const std::filesystem::path& path);
void write_trace(const BandwidthTrace& trace, std::ostream& out);

}  // namespace tilesched
