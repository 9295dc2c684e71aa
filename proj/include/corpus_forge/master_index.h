// include/corpus_forge/master_index.h

// Copyright 2026  The corpus-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "corpus_forge/segmenter.h"

namespace cforge {

inline constexpr const char *kIndexHeader = "#corpus-forge-index v1";

struct MasterIndexEntry {
  std::string file_path;       // archive-relative
  std::string channel;
  std::string broadcast_date;  // YYYY-MM-DD
  SpeechSpan span;

  bool operator==(const MasterIndexEntry &) const = default;
};

bool is_iso_date(const std::string &s);

// Writes the header, optional `#` comment lines, then one
// `path\tchannel\tdate\tstart_ms\tend_ms` row per entry sorted by
// (file_path, start_ms). Fields must not contain tabs or newlines.
void write_master_index(std::ostream &out,
                        std::vector<MasterIndexEntry> entries,
                        const std::vector<std::string> &comments = {});

// Parses an index; `#` lines after the header are skipped. Spans get
// chunk_count = duration / chunk_ms. Throws ParseError(line) or
// OverlapError. The result is sorted like the writer's output.
std::vector<MasterIndexEntry> parse_master_index(std::istream &in,
                                                 std::int64_t chunk_ms = 1000);

// Sum of span durations over the sum of all file durations. Throws
// MissingDuration when an indexed file has no duration.
double speech_ratio(const std::vector<MasterIndexEntry> &index,
                    const std::map<std::string, std::int64_t> &total_ms);

// `path\tduration_ms` rows.
void write_durations(std::ostream &out,
                     const std::map<std::string, std::int64_t> &total_ms);
std::map<std::string, std::int64_t> parse_durations(std::istream &in);

}  // namespace cforge
