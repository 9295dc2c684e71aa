// src/eval.cc

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

#include "corpus_forge/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "corpus_forge/error.h"
#include "corpus_forge/rng.h"
#include "corpus_forge/text_norm.h"

namespace cforge {

using nlohmann::ordered_json;

namespace {

std::vector<std::string> text_field(const ordered_json &j, const char *name,
                                    std::int64_t line) {
  if (!j.contains(name))
    throw Error(Errc::kParseError, std::string("missing field: ") + name, line);
  const auto &v = j.at(name);
  if (v.is_string()) return normalize_tokens(v.get<std::string>());
  if (!v.is_array())
    throw Error(Errc::kParseError,
                std::string(name) + " must be a string or token array", line);
  std::vector<std::string> out;
  for (const auto &t : v) {
    if (!t.is_string())
      throw Error(Errc::kParseError, std::string(name) + ": non-string token",
                  line);
    out.push_back(t.get<std::string>());
  }
  return out;
}

}  // namespace

std::vector<EvalRecord> read_eval_records(std::istream &in) {
  std::vector<EvalRecord> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception &e) {
      throw Error(Errc::kParseError, e.what(), lineno);
    }
    if (!j.is_object())
      throw Error(Errc::kParseError, "record must be a JSON object", lineno);
    EvalRecord r;
    if (!j.contains("utterance_id") || !j["utterance_id"].is_string())
      throw Error(Errc::kParseError, "missing utterance_id", lineno);
    r.utterance_id = j["utterance_id"].get<std::string>();
    r.reference = text_field(j, "reference", lineno);
    r.hypothesis = text_field(j, "hypothesis", lineno);
    if (j.contains("metadata")) {
      const auto &m = j["metadata"];
      if (!m.is_object())
        throw Error(Errc::kParseError, "metadata must be an object", lineno);
      for (auto it = m.begin(); it != m.end(); ++it)
        r.metadata[it.key()] =
            it->is_string() ? it->get<std::string>() : it->dump();
    }
    if (j.contains("empty_reference"))
      r.empty_reference_ok = j["empty_reference"].get<bool>();
    out.push_back(std::move(r));
  }
  return out;
}

void write_eval_record(std::ostream &out, const EvalRecord &r) {
  ordered_json j;
  j["utterance_id"] = r.utterance_id;
  j["reference"] = r.reference;
  j["hypothesis"] = r.hypothesis;
  ordered_json m = ordered_json::object();
  for (const auto &[k, v] : r.metadata) m[k] = v;
  j["metadata"] = m;
  if (r.empty_reference_ok) j["empty_reference"] = true;
  out << j.dump() << '\n';
}

WerBreakdown record_wer(const EvalRecord &r) {
  if (r.reference.empty() && !r.empty_reference_ok)
    throw Error(Errc::kEmptyReference,
                "empty reference in record " + r.utterance_id);
  if (r.reference.empty()) return {};
  return compute_wer(r.reference, r.hypothesis);
}

namespace {

bool scored(const EvalRecord &r) { return !r.reference.empty(); }

// Validates up front so the parallel loop never throws.
std::int64_t check_records(const std::vector<EvalRecord> &records) {
  std::int64_t n = 0;
  for (const auto &r : records) {
    if (r.reference.empty() && !r.empty_reference_ok)
      throw Error(Errc::kEmptyReference,
                  "empty reference in record " + r.utterance_id);
    n += scored(r);
  }
  if (n == 0) throw Error(Errc::kEmptyEvalSet, "no records to evaluate");
  return n;
}

std::vector<std::string> distinct_splits(const std::vector<EvalRecord> &records) {
  std::set<std::string> s;
  for (const auto &r : records) {
    auto it = r.metadata.find("split");
    s.insert(it == r.metadata.end() ? "unspecified" : it->second);
  }
  return {s.begin(), s.end()};
}

std::string pct(double wer) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", wer * 100.0);
  return buf;
}

void render_header(std::ostream &out, const std::vector<std::string> &splits) {
  out << "# normalization: " << kNormalizationVersion << '\n';
  out << "# splits:";
  for (const auto &s : splits) out << ' ' << s;
  out << '\n';
}

void render_table(std::ostream &out,
                  const std::vector<std::vector<std::string>> &rows) {
  std::vector<std::size_t> width;
  for (const auto &r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i)
      width[i] = std::max(width[i], r[i].size());
  }
  for (const auto &r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i == 0) {
        line += r[i] + std::string(width[i] - r[i].size(), ' ');
      } else {
        line += "  " + std::string(width[i] - r[i].size(), ' ') + r[i];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
}

ordered_json group_json(const GroupStats &g) {
  ordered_json j = to_json(g.wer);
  j["records"] = g.records;
  j["low_support"] = g.low_support;
  return j;
}

}  // namespace

WerBreakdown aggregate(const std::vector<EvalRecord> &records) {
  check_records(records);
  const auto n = static_cast<std::int64_t>(records.size());
  std::vector<WerBreakdown> per(records.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i)
    if (scored(records[i]))
      per[i] = compute_wer(records[i].reference, records[i].hypothesis);
  WerBreakdown total;
  for (const auto &w : per) total += w;
  return total;
}

WerBreakdown aggregate_serial(const std::vector<EvalRecord> &records) {
  check_records(records);
  WerBreakdown total;
  for (const auto &r : records)
    if (scored(r)) total += compute_wer(r.reference, r.hypothesis);
  return total;
}

namespace {

const std::string &meta(const EvalRecord &r, const std::string &key) {
  auto it = r.metadata.find(key);
  if (it == r.metadata.end())
    throw Error(Errc::kMissingMetadata,
                "record " + r.utterance_id + " lacks metadata key '" + key +
                    "'");
  return it->second;
}

std::vector<WerBreakdown> score_all(const std::vector<EvalRecord> &records) {
  check_records(records);
  const auto n = static_cast<std::int64_t>(records.size());
  std::vector<WerBreakdown> per(records.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i)
    if (scored(records[i]))
      per[i] = compute_wer(records[i].reference, records[i].hypothesis);
  return per;
}

}  // namespace

StratifiedReport stratified_report(const std::vector<EvalRecord> &records,
                                   const std::string &key,
                                   std::int64_t min_support) {
  for (const auto &r : records) meta(r, key);
  const auto per = score_all(records);
  StratifiedReport rep;
  rep.key = key;
  rep.min_support = min_support;
  rep.splits = distinct_splits(records);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!scored(records[i])) continue;
    auto &g = rep.groups[meta(records[i], key)];
    g.wer += per[i];
    ++g.records;
    rep.overall += per[i];
  }
  for (auto &[_, g] : rep.groups) g.low_support = g.records < min_support;
  return rep;
}

GridReport grid_report(const std::vector<EvalRecord> &records,
                       const std::string &row_key, const std::string &col_key,
                       std::int64_t min_support) {
  for (const auto &r : records) {
    meta(r, row_key);
    meta(r, col_key);
  }
  const auto per = score_all(records);
  GridReport rep;
  rep.row_key = row_key;
  rep.col_key = col_key;
  rep.min_support = min_support;
  rep.splits = distinct_splits(records);
  std::set<std::string> rows, cols;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!scored(records[i])) continue;
    const auto &rv = meta(records[i], row_key);
    const auto &cv = meta(records[i], col_key);
    rows.insert(rv);
    cols.insert(cv);
    auto &cell = rep.cells[{rv, cv}];
    cell.wer += per[i];
    ++cell.records;
    auto &tot = rep.col_totals[cv];
    tot.wer += per[i];
    ++tot.records;
  }
  rep.rows.assign(rows.begin(), rows.end());
  rep.cols.assign(cols.begin(), cols.end());
  for (auto &[_, c] : rep.cells) c.low_support = c.records < min_support;
  for (auto &[_, c] : rep.col_totals) c.low_support = c.records < min_support;
  return rep;
}

ordered_json to_json(const WerBreakdown &w) {
  ordered_json j;
  j["S"] = w.substitutions;
  j["I"] = w.insertions;
  j["D"] = w.deletions;
  j["N"] = w.ref_tokens;
  j["wer"] = w.wer();
  return j;
}

ordered_json to_json(const StratifiedReport &r) {
  ordered_json j;
  j["normalization"] = kNormalizationVersion;
  j["splits"] = r.splits;
  j["stratify"] = r.key;
  j["min_support"] = r.min_support;
  j["overall"] = to_json(r.overall);
  ordered_json groups = ordered_json::object();
  for (const auto &[k, g] : r.groups) groups[k] = group_json(g);
  j["groups"] = groups;
  return j;
}

ordered_json to_json(const GridReport &r) {
  ordered_json j;
  j["normalization"] = kNormalizationVersion;
  j["splits"] = r.splits;
  j["rows_key"] = r.row_key;
  j["cols_key"] = r.col_key;
  j["min_support"] = r.min_support;
  j["rows"] = r.rows;
  j["cols"] = r.cols;
  ordered_json cells = ordered_json::object();
  for (const auto &row : r.rows) {
    ordered_json line = ordered_json::object();
    for (const auto &col : r.cols) {
      auto it = r.cells.find({row, col});
      if (it != r.cells.end()) line[col] = group_json(it->second);
    }
    cells[row] = line;
  }
  j["cells"] = cells;
  ordered_json totals = ordered_json::object();
  for (const auto &[k, g] : r.col_totals) totals[k] = group_json(g);
  j["totals"] = totals;
  return j;
}

void render_text(std::ostream &out, const WerBreakdown &overall,
                 std::int64_t records) {
  render_header(out, {});
  render_table(out, {{"records", "S", "I", "D", "N", "WER%"},
                     {std::to_string(records),
                      std::to_string(overall.substitutions),
                      std::to_string(overall.insertions),
                      std::to_string(overall.deletions),
                      std::to_string(overall.ref_tokens), pct(overall.wer())}});
}

void render_text(std::ostream &out, const StratifiedReport &r) {
  render_header(out, r.splits);
  std::vector<std::vector<std::string>> rows;
  rows.push_back({r.key, "records", "S", "I", "D", "N", "WER%", ""});
  auto row = [&](const std::string &name, const WerBreakdown &w,
                 std::int64_t n, bool low) {
    rows.push_back({name, std::to_string(n), std::to_string(w.substitutions),
                    std::to_string(w.insertions), std::to_string(w.deletions),
                    std::to_string(w.ref_tokens), pct(w.wer()),
                    low ? "low-support" : ""});
  };
  std::int64_t total = 0;
  for (const auto &[k, g] : r.groups) {
    row(k, g.wer, g.records, g.low_support);
    total += g.records;
  }
  row("(all)", r.overall, total, false);
  render_table(out, rows);
}

// Table-shaped: one line per row value, one WER% column per column value.
// '*' marks low-support cells, '-' empty ones.
void render_text(std::ostream &out, const GridReport &r) {
  render_header(out, r.splits);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{r.row_key + " \\ " + r.col_key};
  for (const auto &c : r.cols) head.push_back(c);
  rows.push_back(head);
  auto cell_text = [](const GroupStats &g) {
    return pct(g.wer.wer()) + (g.low_support ? "*" : " ");
  };
  for (const auto &row : r.rows) {
    std::vector<std::string> line{row};
    for (const auto &col : r.cols) {
      auto it = r.cells.find({row, col});
      line.push_back(it == r.cells.end() ? "- " : cell_text(it->second));
    }
    rows.push_back(line);
  }
  std::vector<std::string> tot{"(all)"};
  for (const auto &col : r.cols) tot.push_back(cell_text(r.col_totals.at(col)));
  rows.push_back(tot);
  render_table(out, rows);
  out << "# * fewer than " << r.min_support << " records\n";
}

SplitResult split_by_sentence(const std::vector<SplitRow> &rows,
                              double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(Errc::kInvalidArgument, "test fraction must be in (0, 1)");
  std::vector<std::string> norm(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    norm[i] = normalize_text(rows[i].sentence);
  std::vector<std::string> unique(norm);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  const auto u = static_cast<std::int64_t>(unique.size());
  if (u < 2)
    throw Error(Errc::kTooFewSentences,
                "need at least 2 unique sentences, got " + std::to_string(u));

  // The epsilon keeps e.g. 0.02 * 100 from rounding up to 3.
  auto k = static_cast<std::int64_t>(std::ceil(test_fraction * u - 1e-9));
  k = std::clamp<std::int64_t>(k, 1, u - 1);

  CounterRng rng(seed);
  for (std::int64_t i = u - 1; i > 0; --i)
    std::swap(unique[i], unique[rng.uniform(static_cast<std::uint64_t>(i + 1))]);
  std::set<std::string> test(unique.begin(), unique.begin() + k);

  SplitResult res;
  res.unique_sentences = u;
  res.test_sentences = k;
  res.row_is_test.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool is_test = test.count(norm[i]) > 0;
    res.row_is_test[i] = is_test;
    (is_test ? res.test_ids : res.train_ids).push_back(rows[i].id);
  }
  return res;
}

std::vector<SplitRow> read_split_rows(std::istream &in) {
  std::vector<SplitRow> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    for (;;) {
      auto tab = line.find('\t', pos);
      f.push_back(line.substr(pos, tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (f.size() < 2 || f.size() > 4 || f[0].empty())
      throw Error(Errc::kParseError,
                  "expected id, sentence[, speaker[, region]]", lineno);
    f.resize(4);
    out.push_back({f[0], f[1], f[2], f[3]});
  }
  return out;
}

}  // namespace cforge
