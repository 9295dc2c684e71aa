// include/corpus_forge/eval.h

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

#include "json.hpp"

#include "corpus_forge/wer.h"

namespace cforge {

struct EvalRecord {
  std::string utterance_id;
  std::vector<std::string> reference;
  std::vector<std::string> hypothesis;
  std::map<std::string, std::string> metadata;
  // Set for records known to have no reference text; these are skipped
  // by aggregation instead of raising EmptyReference.
  bool empty_reference_ok = false;
};

// One JSON object per line: utterance_id, reference, hypothesis, metadata
// and optionally empty_reference. Text fields may be strings (normalized
// here) or arrays of tokens (taken as already normalized). Blank lines are
// skipped; errors carry the 1-based line number.
std::vector<EvalRecord> read_eval_records(std::istream &in);
void write_eval_record(std::ostream &out, const EvalRecord &r);

WerBreakdown record_wer(const EvalRecord &r);

// Pooled counts over all records. Throws EmptyEvalSet when nothing is left
// to score.
WerBreakdown aggregate(const std::vector<EvalRecord> &records);
WerBreakdown aggregate_serial(const std::vector<EvalRecord> &records);

struct GroupStats {
  WerBreakdown wer;
  std::int64_t records = 0;
  bool low_support = false;
};

struct StratifiedReport {
  std::string key;
  std::int64_t min_support = 0;
  WerBreakdown overall;
  std::map<std::string, GroupStats> groups;  // lexicographic by value
  std::vector<std::string> splits;           // distinct metadata["split"]
};

inline constexpr std::int64_t kDefaultMinSupport = 10;

// Throws MissingMetadata naming the first record without `key`.
StratifiedReport stratified_report(const std::vector<EvalRecord> &records,
                                   const std::string &key,
                                   std::int64_t min_support = kDefaultMinSupport);

// Rows × columns grid, e.g. region × model. Empty cells are absent.
struct GridReport {
  std::string row_key, col_key;
  std::int64_t min_support = 0;
  std::vector<std::string> rows, cols;
  std::map<std::pair<std::string, std::string>, GroupStats> cells;
  std::map<std::string, GroupStats> col_totals;
  std::vector<std::string> splits;
};

GridReport grid_report(const std::vector<EvalRecord> &records,
                       const std::string &row_key, const std::string &col_key,
                       std::int64_t min_support = kDefaultMinSupport);

nlohmann::ordered_json to_json(const WerBreakdown &w);
nlohmann::ordered_json to_json(const StratifiedReport &r);
nlohmann::ordered_json to_json(const GridReport &r);
void render_text(std::ostream &out, const WerBreakdown &overall,
                 std::int64_t records);
void render_text(std::ostream &out, const StratifiedReport &r);
void render_text(std::ostream &out, const GridReport &r);

struct SplitRow {
  std::string id;
  std::string sentence;
  std::string speaker;
  std::string region;
};

struct SplitResult {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<bool> row_is_test;  // parallel to the input rows
  std::int64_t unique_sentences = 0;
  std::int64_t test_sentences = 0;
};

// Partitions unique normalized sentences, then sends each row to its
// sentence's side. The test side gets ceil(fraction * unique) sentences,
// clamped so neither side is empty. Ids keep input order.
SplitResult split_by_sentence(const std::vector<SplitRow> &rows,
                              double test_fraction, std::uint64_t seed);

// TSV: id, sentence[, speaker[, region]]; '#' lines are comments.
std::vector<SplitRow> read_split_rows(std::istream &in);

}  // namespace cforge
