// include/corpus_forge/sampler.h

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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corpus_forge/master_index.h"

namespace cforge {

struct SampleRequest {
  double target_hours = 1.0;
  std::int64_t span_ms = 30000;
  std::uint64_t seed = 0;
  std::vector<std::string> channels;      // empty: every channel
  std::optional<std::string> date_from;   // inclusive, YYYY-MM-DD
  std::optional<std::string> date_to;     // inclusive

  // Canonical text of the filters; folded into the effective seed.
  std::string filter_description() const;
  std::uint64_t effective_seed() const;
  void validate() const;
};

struct CorpusManifestEntry {
  std::int64_t sample_id = 0;
  std::string source_path;
  std::string channel;
  std::string broadcast_date;
  std::int64_t cut_start_ms = 0;
  std::int64_t cut_end_ms = 0;
  std::string output_path;  // relative to the corpus output directory

  bool operator==(const CorpusManifestEntry &) const = default;
};

struct SampleResult {
  std::vector<CorpusManifestEntry> entries;
  std::int64_t total_ms = 0;
  bool saturated = false;  // ran out of placements before the target
};

// Draws span_ms placements without replacement. Every index span is cut
// into floor(len / span_ms) aligned slots; each draw picks a span with
// probability proportional to its remaining slots, then one of those slots
// uniformly. Stops once total duration reaches the target. Throws
// NoCandidates when no span holds a full slot after filtering.
SampleResult sample_corpus(const std::vector<MasterIndexEntry> &index,
                           const SampleRequest &req);

// `<channel>/<date>/<sample_id>.wav` with path separators in the channel
// replaced by '_'.
std::string sample_output_path(const std::string &channel,
                               const std::string &date,
                               std::int64_t sample_id);

// JSON lines with keys in the fixed order sample_id, source_path, channel,
// broadcast_date, cut_start_ms, cut_end_ms, output_path.
void write_manifest(std::ostream &out,
                    const std::vector<CorpusManifestEntry> &entries);
std::vector<CorpusManifestEntry> parse_manifest(std::istream &in);

struct CutFailure {
  std::int64_t sample_id = 0;
  std::string message;
};

struct CutReport {
  std::int64_t written = 0;
  std::vector<CutFailure> failures;  // sorted by sample_id
};

// Writes each entry as 16-bit mono WAVE at `rate` under `out_root`.
// Failures are collected per entry; the rest of the run continues.
// Entries are grouped by source file and groups run in parallel.
CutReport cut_samples(const std::vector<CorpusManifestEntry> &manifest,
                      const std::filesystem::path &audio_root,
                      const std::filesystem::path &out_root,
                      int rate = 16000);

}  // namespace cforge
