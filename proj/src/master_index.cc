// src/master_index.cc

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

#include "corpus_forge/master_index.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>

#include "corpus_forge/error.h"

namespace cforge {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto t = line.find('\t', start);
    out.push_back(line.substr(start, t - start));
    if (t == std::string_view::npos) break;
    start = t + 1;
  }
  return out;
}

std::int64_t parse_int(std::string_view f, std::int64_t line_no,
                       const char *what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size())
    throw Error(Errc::kParseError,
                std::string("bad ") + what + " on line " +
                    std::to_string(line_no),
                line_no);
  return v;
}

bool has_control(const std::string &s) {
  return s.find_first_of("\t\n\r") != std::string::npos;
}

bool entry_less(const MasterIndexEntry &a, const MasterIndexEntry &b) {
  if (a.file_path != b.file_path) return a.file_path < b.file_path;
  return a.span.start_ms < b.span.start_ms;
}

}  // namespace

bool is_iso_date(const std::string &s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (s[i] < '0' || s[i] > '9') return false;
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

void write_master_index(std::ostream &out,
                        std::vector<MasterIndexEntry> entries,
                        const std::vector<std::string> &comments) {
  for (const auto &e : entries) {
    if (e.file_path.empty())
      throw Error(Errc::kInvalidArgument, "index entry with empty file_path");
    if (has_control(e.file_path) || has_control(e.channel) ||
        has_control(e.broadcast_date))
      throw Error(Errc::kInvalidArgument,
                  "index fields may not contain tabs or newlines: " +
                      e.file_path);
  }
  std::stable_sort(entries.begin(), entries.end(), entry_less);
  out << kIndexHeader << '\n';
  for (const auto &c : comments) out << '#' << c << '\n';
  for (const auto &e : entries)
    out << e.file_path << '\t' << e.channel << '\t' << e.broadcast_date << '\t'
        << e.span.start_ms << '\t' << e.span.end_ms << '\n';
}

std::vector<MasterIndexEntry> parse_master_index(std::istream &in,
                                                 std::int64_t chunk_ms) {
  if (chunk_ms <= 0)
    throw Error(Errc::kInvalidArgument, "chunk_ms must be positive");
  std::string line;
  std::int64_t line_no = 0;
  if (!std::getline(in, line))
    throw Error(Errc::kParseError, "empty index file", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kIndexHeader)
    throw Error(Errc::kParseError, "missing index header", 1);

  std::vector<MasterIndexEntry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() != 5)
      throw Error(Errc::kParseError,
                  "expected 5 fields on line " + std::to_string(line_no),
                  line_no);
    MasterIndexEntry e;
    e.file_path = std::string(f[0]);
    e.channel = std::string(f[1]);
    e.broadcast_date = std::string(f[2]);
    e.span.start_ms = parse_int(f[3], line_no, "start_ms");
    e.span.end_ms = parse_int(f[4], line_no, "end_ms");
    if (e.file_path.empty())
      throw Error(Errc::kParseError,
                  "empty file_path on line " + std::to_string(line_no),
                  line_no);
    if (!is_iso_date(e.broadcast_date))
      throw Error(Errc::kParseError,
                  "broadcast_date is not YYYY-MM-DD on line " +
                      std::to_string(line_no),
                  line_no);
    if (e.span.start_ms < 0 || e.span.end_ms <= e.span.start_ms)
      throw Error(Errc::kParseError,
                  "span must satisfy 0 <= start < end on line " +
                      std::to_string(line_no),
                  line_no);
    e.span.chunk_count = e.span.duration_ms() / chunk_ms;
    entries.push_back(std::move(e));
  }
  std::stable_sort(entries.begin(), entries.end(), entry_less);
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const auto &a = entries[i - 1];
    const auto &b = entries[i];
    if (a.file_path == b.file_path && b.span.start_ms < a.span.end_ms)
      throw Error(Errc::kOverlapError,
                  "spans [" + std::to_string(a.span.start_ms) + "," +
                      std::to_string(a.span.end_ms) + ") and [" +
                      std::to_string(b.span.start_ms) + "," +
                      std::to_string(b.span.end_ms) + ") overlap in " +
                      a.file_path);
  }
  return entries;
}

double speech_ratio(const std::vector<MasterIndexEntry> &index,
                    const std::map<std::string, std::int64_t> &total_ms) {
  std::int64_t speech = 0;
  for (const auto &e : index) {
    if (!total_ms.count(e.file_path))
      throw Error(Errc::kMissingDuration,
                  "no duration for indexed file " + e.file_path);
    speech += e.span.duration_ms();
  }
  std::int64_t total = 0;
  for (const auto &[path, ms] : total_ms) total += ms;
  if (total <= 0) return 0.0;
  return std::clamp(static_cast<double>(speech) / static_cast<double>(total),
                    0.0, 1.0);
}

void write_durations(std::ostream &out,
                     const std::map<std::string, std::int64_t> &total_ms) {
  for (const auto &[path, ms] : total_ms) out << path << '\t' << ms << '\n';
}

std::map<std::string, std::int64_t> parse_durations(std::istream &in) {
  std::map<std::string, std::int64_t> out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() != 2)
      throw Error(Errc::kParseError,
                  "expected path<TAB>duration_ms on line " +
                      std::to_string(line_no),
                  line_no);
    out[std::string(f[0])] = parse_int(f[1], line_no, "duration_ms");
  }
  return out;
}

}  // namespace cforge
