// src/sampler.cc

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

#include "corpus_forge/sampler.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "corpus_forge/audio_io.h"
#include "corpus_forge/error.h"
#include "corpus_forge/rng.h"
#include "json.hpp"

namespace cforge {

namespace {

// Fenwick tree over per-span remaining slot counts.
class SlotTree {
 public:
  explicit SlotTree(const std::vector<std::int64_t> &counts)
      : tree_(counts.size() + 1, 0) {
    for (std::size_t i = 0; i < counts.size(); ++i) add(i, counts[i]);
    step_ = 1;
    while (step_ * 2 <= counts.size()) step_ *= 2;
  }

  void add(std::size_t i, std::int64_t delta) {
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1))
      tree_[k] += delta;
  }

  // Smallest i with prefix_sum(0..i) > r.
  std::size_t find(std::int64_t r) const {
    std::size_t pos = 0;
    for (std::size_t step = step_; step > 0; step >>= 1) {
      if (pos + step < tree_.size() && tree_[pos + step] <= r) {
        pos += step;
        r -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<std::int64_t> tree_;
  std::size_t step_ = 1;
};

std::string sanitize_component(const std::string &s) {
  std::string out = s;
  for (char &c : out)
    if (c == '/' || c == '\\' || c == ':') c = '_';
  if (out.empty() || out == "." || out == "..") out = "unknown";
  return out;
}

}  // namespace

std::string SampleRequest::filter_description() const {
  std::set<std::string> uniq(channels.begin(), channels.end());
  std::string d = "channels=";
  bool first = true;
  for (const auto &c : uniq) {
    if (!first) d += ',';
    d += c;
    first = false;
  }
  d += ";from=" + date_from.value_or("");
  d += ";to=" + date_to.value_or("");
  return d;
}

std::uint64_t SampleRequest::effective_seed() const {
  return splitmix64_mix(seed ^ fnv1a64(filter_description()));
}

void SampleRequest::validate() const {
  if (!(target_hours > 0.0) || !std::isfinite(target_hours))
    throw Error(Errc::kInvalidArgument, "target_hours must be > 0");
  if (span_ms <= 0) throw Error(Errc::kInvalidArgument, "span_ms must be > 0");
  if (date_from && !is_iso_date(*date_from))
    throw Error(Errc::kInvalidArgument, "date_from must be YYYY-MM-DD");
  if (date_to && !is_iso_date(*date_to))
    throw Error(Errc::kInvalidArgument, "date_to must be YYYY-MM-DD");
}

std::string sample_output_path(const std::string &channel,
                               const std::string &date,
                               std::int64_t sample_id) {
  return sanitize_component(channel) + "/" + sanitize_component(date) + "/" +
         std::to_string(sample_id) + ".wav";
}

SampleResult sample_corpus(const std::vector<MasterIndexEntry> &index,
                           const SampleRequest &req) {
  req.validate();
  const std::set<std::string> wanted(req.channels.begin(), req.channels.end());

  std::vector<const MasterIndexEntry *> candidates;
  std::vector<std::int64_t> slots;
  for (const auto &e : index) {
    if (!wanted.empty() && !wanted.count(e.channel)) continue;
    if (req.date_from && e.broadcast_date < *req.date_from) continue;
    if (req.date_to && e.broadcast_date > *req.date_to) continue;
    const std::int64_t k = e.span.duration_ms() / req.span_ms;
    if (k <= 0) continue;
    candidates.push_back(&e);
    slots.push_back(k);
  }
  if (candidates.empty())
    throw Error(Errc::kNoCandidates,
                "no index span holds a " + std::to_string(req.span_ms) +
                    "ms placement after filtering");

  std::int64_t remaining = 0;
  for (auto k : slots) remaining += k;
  SlotTree tree(slots);
  // Remaining slot ordinals per span, materialized on first touch.
  std::map<std::size_t, std::vector<std::int64_t>> pools;

  const auto target_ms =
      static_cast<std::int64_t>(std::ceil(req.target_hours * 3600000.0));
  CounterRng rng(req.effective_seed());
  SampleResult result;
  while (result.total_ms < target_ms && remaining > 0) {
    const auto r = static_cast<std::int64_t>(
        rng.uniform(static_cast<std::uint64_t>(remaining)));
    const std::size_t span = tree.find(r);
    auto [it, fresh] = pools.try_emplace(span);
    auto &pool = it->second;
    if (fresh) {
      pool.resize(slots[span]);
      for (std::int64_t s = 0; s < slots[span]; ++s) pool[s] = s;
    }
    const auto pick = rng.uniform(pool.size());
    const std::int64_t slot = pool[pick];
    pool[pick] = pool.back();
    pool.pop_back();
    tree.add(span, -1);
    --remaining;

    const MasterIndexEntry &e = *candidates[span];
    CorpusManifestEntry m;
    m.sample_id = static_cast<std::int64_t>(result.entries.size());
    m.source_path = e.file_path;
    m.channel = e.channel;
    m.broadcast_date = e.broadcast_date;
    m.cut_start_ms = e.span.start_ms + slot * req.span_ms;
    m.cut_end_ms = m.cut_start_ms + req.span_ms;
    m.output_path = sample_output_path(e.channel, e.broadcast_date, m.sample_id);
    result.entries.push_back(std::move(m));
    result.total_ms += req.span_ms;
  }
  result.saturated = result.total_ms < target_ms;
  return result;
}

void write_manifest(std::ostream &out,
                    const std::vector<CorpusManifestEntry> &entries) {
  for (const auto &e : entries) {
    nlohmann::ordered_json j;
    j["sample_id"] = e.sample_id;
    j["source_path"] = e.source_path;
    j["channel"] = e.channel;
    j["broadcast_date"] = e.broadcast_date;
    j["cut_start_ms"] = e.cut_start_ms;
    j["cut_end_ms"] = e.cut_end_ms;
    j["output_path"] = e.output_path;
    out << j.dump() << '\n';
  }
}

std::vector<CorpusManifestEntry> parse_manifest(std::istream &in) {
  std::vector<CorpusManifestEntry> out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CorpusManifestEntry e;
      e.sample_id = j.at("sample_id").get<std::int64_t>();
      e.source_path = j.at("source_path").get<std::string>();
      e.channel = j.at("channel").get<std::string>();
      e.broadcast_date = j.at("broadcast_date").get<std::string>();
      e.cut_start_ms = j.at("cut_start_ms").get<std::int64_t>();
      e.cut_end_ms = j.at("cut_end_ms").get<std::int64_t>();
      e.output_path = j.at("output_path").get<std::string>();
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception &ex) {
      throw Error(Errc::kParseError,
                  "manifest line " + std::to_string(line_no) + ": " + ex.what(),
                  line_no);
    }
  }
  return out;
}

CutReport cut_samples(const std::vector<CorpusManifestEntry> &manifest,
                      const std::filesystem::path &audio_root,
                      const std::filesystem::path &out_root, int rate) {
  namespace fs = std::filesystem;
  std::map<std::string, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < manifest.size(); ++i)
    by_source[manifest[i].source_path].push_back(i);
  std::vector<const std::vector<std::size_t> *> groups;
  for (const auto &[src, idx] : by_source) groups.push_back(&idx);

  for (const auto &e : manifest) {
    std::error_code ec;
    fs::create_directories((out_root / e.output_path).parent_path(), ec);
  }

  std::vector<std::string> errors(manifest.size());
  std::vector<char> ok(manifest.size(), 0);
  const auto n_groups = static_cast<std::ptrdiff_t>(groups.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t g = 0; g < n_groups; ++g) {
    const auto &members = *groups[g];
    const auto &source = manifest[members.front()].source_path;
    AudioBuffer audio;
    std::string load_error;
    try {
      audio = load_audio_file(audio_root / source, rate);
    } catch (const std::exception &ex) {
      load_error = ex.what();
    }
    for (std::size_t i : members) {
      const auto &e = manifest[i];
      if (!load_error.empty()) {
        errors[i] = load_error;
        continue;
      }
      try {
        const std::int64_t begin = e.cut_start_ms * rate / 1000;
        const std::int64_t end = e.cut_end_ms * rate / 1000;
        if (begin < 0 || end <= begin ||
            end > static_cast<std::int64_t>(audio.samples.size()))
          throw Error(Errc::kCutError,
                      "cut [" + std::to_string(e.cut_start_ms) + "," +
                          std::to_string(e.cut_end_ms) + ") exceeds " +
                          std::to_string(audio.duration_ms()) + "ms source " +
                          source);
        AudioBuffer piece;
        piece.sample_rate = rate;
        piece.samples.assign(audio.samples.begin() + begin,
                             audio.samples.begin() + end);
        write_wav16_file(out_root / e.output_path, piece);
        ok[i] = 1;
      } catch (const std::exception &ex) {
        errors[i] = ex.what();
      }
    }
  }

  CutReport report;
  std::vector<std::size_t> order(manifest.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return manifest[a].sample_id < manifest[b].sample_id;
  });
  for (std::size_t i : order) {
    if (ok[i])
      ++report.written;
    else
      report.failures.push_back({manifest[i].sample_id, errors[i]});
  }
  return report;
}

}  // namespace cforge
