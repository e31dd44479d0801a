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

#include "tilesched/segment_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "text_io.hpp"
#include "tilesched/error.hpp"

namespace tilesched {

void write_segment(const VideoSegment& segment, std::ostream& out) {
  const int gop = segment.tiles.empty() ? 1 : segment.tiles.front().gop_length;
  out << "tiles " << segment.tile_count() << " frames " << segment.frames_per_tile << " gop "
      << gop << '\n';
  for (const auto& tile : segment.tiles) {
    for (const auto& p : tile.packets) {
      out << p.tile << ' ' << p.frame << ' ' << frame_type_char(p.type) << ' ' << p.size_bytes
          << ' ' << text::format_double(p.propagation_penalty) << '\n';
    }
  }
  for (int t = 0; t < segment.tile_count(); ++t) {
    const DistortionMatrix& d = segment.distortion[t];
    for (int i = 1; i < d.frames(); ++i) {
      for (int j = 0; j < i; ++j) {
        out << t << ' ' << i << ' ' << j << ' ' << text::format_double(d.at(i, j)) << '\n';
      }
    }
  }
}

VideoSegment read_segment(std::istream& in) {
  std::string line;
  int line_no = 0;
  int tiles = -1;
  int frames = -1;
  int gop = -1;

  while (tiles < 0 && std::getline(in, line)) {
    ++line_no;
    const auto f = text::fields(text::strip_comment(line));
    if (f.empty()) continue;
    if (f.size() < 4 || f[0] != "tiles" || f[2] != "frames") {
      throw ParseError("expected header 'tiles <t> frames <n> [gop <g>]'", line_no);
    }
    tiles = text::parse_number<int>(f[1], line_no, "tile count");
    frames = text::parse_number<int>(f[3], line_no, "frame count");
    if (f.size() == 6 && f[4] == "gop") {
      gop = text::parse_number<int>(f[5], line_no, "gop length");
    } else if (f.size() != 4) {
      throw ParseError("unexpected fields after header", line_no);
    } else {
      gop = frames;
    }
    if (tiles <= 0 || frames <= 0 || gop <= 0) {
      throw ParseError("header counts must be positive", line_no);
    }
  }
  if (tiles < 0) throw ParseError("missing header", line_no);

  VideoSegment seg;
  seg.frames_per_tile = frames;
  seg.tiles.resize(tiles);
  seg.distortion.assign(tiles, DistortionMatrix(frames));
  std::vector<std::vector<bool>> have_packet(tiles, std::vector<bool>(frames, false));
  std::vector<std::vector<bool>> have_entry(tiles);
  for (auto& row : have_entry) row.assign(static_cast<std::size_t>(frames) * (frames + 1) / 2, false);
  for (int t = 0; t < tiles; ++t) {
    seg.tiles[t].tile_index = t;
    seg.tiles[t].gop_length = gop;
    seg.tiles[t].packets.resize(frames);
  }

  auto check_index = [&](int value, int limit, const char* what) {
    if (value < 0 || value >= limit) {
      throw ParseError(std::string(what) + " " + std::to_string(value) + " out of range", line_no);
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto f = text::fields(text::strip_comment(line));
    if (f.empty()) continue;
    if (f.size() == 5) {
      const int t = text::parse_number<int>(f[0], line_no, "tile");
      const int fr = text::parse_number<int>(f[1], line_no, "frame");
      check_index(t, tiles, "tile");
      check_index(fr, frames, "frame");
      if (f[2].size() != 1) throw ParseError("bad frame type '" + std::string(f[2]) + "'", line_no);
      if (have_packet[t][fr]) throw ParseError("duplicate packet record", line_no);
      Packet& p = seg.tiles[t].packets[fr];
      p.tile = t;
      p.frame = fr;
      try {
        p.type = frame_type_from_char(f[2][0]);
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_no);
      }
      p.size_bytes = text::parse_number<std::int64_t>(f[3], line_no, "size");
      p.propagation_penalty = text::parse_number<double>(f[4], line_no, "omega");
      have_packet[t][fr] = true;
    } else if (f.size() == 4) {
      const int t = text::parse_number<int>(f[0], line_no, "tile");
      const int i = text::parse_number<int>(f[1], line_no, "row");
      const int j = text::parse_number<int>(f[2], line_no, "column");
      check_index(t, tiles, "tile");
      check_index(i, frames, "row");
      if (j < 0 || j > i) throw ParseError("entry must satisfy 0 <= j <= i", line_no);
      const double value = text::parse_number<double>(f[3], line_no, "distortion");
      if (i == j) {
        if (value != 0.0) {
          throw ValidationError("line " + std::to_string(line_no) + ": tile " + std::to_string(t) +
                                " d[" + std::to_string(i) + "][" + std::to_string(i) +
                                "] must be 0");
        }
        continue;
      }
      auto slot = have_entry[t].begin() + static_cast<std::ptrdiff_t>(i) * (i + 1) / 2 + j;
      if (*slot) throw ParseError("duplicate distortion record", line_no);
      *slot = true;
      seg.distortion[t].set(i, j, value);
    } else {
      throw ParseError("expected a packet record (5 fields) or a distortion record (4 fields)",
                       line_no);
    }
  }

  for (int t = 0; t < tiles; ++t) {
    for (int fr = 0; fr < frames; ++fr) {
      if (!have_packet[t][fr]) {
        throw ParseError("missing packet record for tile " + std::to_string(t) + " frame " +
                             std::to_string(fr),
                         line_no);
      }
    }
    for (int i = 1; i < frames; ++i) {
      for (int j = 0; j < i; ++j) {
        if (!have_entry[t][static_cast<std::size_t>(i) * (i + 1) / 2 + j]) {
          throw ParseError("missing distortion record for tile " + std::to_string(t) + " d[" +
                               std::to_string(i) + "][" + std::to_string(j) + "]",
                           line_no);
        }
      }
    }
  }
  seg.validate();
  return seg;
}

void save_segment(const VideoSegment& segment, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_segment(segment, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

VideoSegment load_segment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_segment(in);
}

}  // namespace tilesched
