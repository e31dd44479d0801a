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

#include "tilesched/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "tilesched/error.hpp"
#include "text_io.hpp"

namespace tilesched {

BandwidthTrace::BandwidthTrace(std::vector<TracePoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw ValidationError("bandwidth trace has no records");
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (!(points_[k].throughput_bps >= 0.0) || !std::isfinite(points_[k].throughput_bps)) {
      throw ValidationError("trace record " + std::to_string(k) +
                            ": throughput must be finite and non-negative");
    }
    if (k > 0 && points_[k].time_ms <= points_[k - 1].time_ms) {
      throw ValidationError("trace timestamps must be strictly increasing (record " +
                            std::to_string(k) + ")");
    }
  }
}

std::int64_t BandwidthTrace::start_ms() const {
  if (points_.empty()) throw ValidationError("empty bandwidth trace");
  return points_.front().time_ms;
}

std::int64_t BandwidthTrace::end_ms() const {
  if (points_.empty()) throw ValidationError("empty bandwidth trace");
  // The last record lasts as long as the one before it.
  const std::int64_t last_span =
      points_.size() > 1 ? points_.back().time_ms - points_[points_.size() - 2].time_ms
                         : kDefaultTraceStepMs;
  return points_.back().time_ms + last_span;
}

std::int64_t BandwidthTrace::bytes_between(double begin_ms, double end_ms) const {
  if (end_ms <= begin_ms) return 0;
  const double stop = static_cast<double>(this->end_ms());
  double bits = 0.0;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const double lo = static_cast<double>(points_[k].time_ms);
    const double hi = k + 1 < points_.size() ? static_cast<double>(points_[k + 1].time_ms) : stop;
    const double a = std::max(lo, begin_ms);
    const double b = std::min(hi, end_ms);
    if (b > a) bits += points_[k].throughput_bps * (b - a) / 1000.0;
  }
  return static_cast<std::int64_t>(std::floor(bits / 8.0 + 1e-9));
}

BandwidthTrace BandwidthTrace::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw ValidationError("trace scale factor must be finite and non-negative");
  }
  std::vector<TracePoint> out = points_;
  for (auto& p : out) p.throughput_bps *= factor;
  return BandwidthTrace(std::move(out));
}

BandwidthTrace constant_trace(double mbps, std::int64_t duration_ms) {
  if (duration_ms <= 0) throw ValidationError("trace duration must be positive");
  if (!(mbps >= 0.0) || !std::isfinite(mbps)) {
    throw ValidationError("bandwidth must be finite and non-negative");
  }
  std::vector<TracePoint> points;
  for (std::int64_t t = 0; t < duration_ms; t += kDefaultTraceStepMs) {
    points.push_back({t, mbps * 1e6});
  }
  return BandwidthTrace(std::move(points));
}

BandwidthTrace read_trace(std::istream& in) {
  std::vector<TracePoint> points;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto f = text::fields(text::strip_comment(raw));
    if (f.empty()) continue;
    if (f.size() != 2) throw ParseError("expected 'time_ms throughput_bps'", line);
    TracePoint p;
    p.time_ms = text::parse_number<std::int64_t>(f[0], line, "timestamp");
    p.throughput_bps = text::parse_number<double>(f[1], line, "throughput");
    points.push_back(p);
  }
  if (points.empty()) throw ValidationError("bandwidth trace has no records");
  return BandwidthTrace(std::move(points));
}

BandwidthTrace load_lte_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trace file " + path.string());
  return read_trace(in);
}

void write_trace(const BandwidthTrace& trace, std::ostream& out) {
  out << "# time_ms throughput_bps\n";
  for (const auto& p : trace.points()) {
    out << p.time_ms << ' ' << text::format_double(p.throughput_bps) << '\n';
  }
}

}  // namespace tilesched
