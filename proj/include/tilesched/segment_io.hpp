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

// Line-oriented segment format:
//
//   tiles <t> frames <n> gop <g>
//   <tile> <frame> <I|P|B> <size_bytes> <omega>      one per packet
//   <tile> <i> <j> <d>                               one per entry with j < i
//
// Blank lines and lines starting with '#' are ignored. Diagonal entries may
// be present but must be zero. Reals are written in shortest round-trip form.

#include <filesystem>
#include <iosfwd>

#include "tilesched/media.hpp"

namespace tilesched {

void write_segment(const VideoSegment& segment, std::ostream& out);
VideoSegment read_segment(std::istream& in);

void save_segment(const VideoSegment& segment, const std::filesystem::path& path);
VideoSegment load_segment(const std::filesystem::path& path);

}  // namespace tilesched
