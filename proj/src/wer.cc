// src/wer.cc

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

#include "corpus_forge/wer.h"

#include <utility>
#include <vector>

#include "corpus_forge/error.h"

namespace cforge {

namespace {

// (edits, insertions + deletions), compared lexicographically.
using Cost = std::pair<std::int64_t, std::int64_t>;

Cost align_cost(std::span<const std::string> ref,
                std::span<const std::string> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<Cost> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {j, j};
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {i, i};
    for (std::size_t j = 1; j <= m; ++j) {
      Cost best = prev[j - 1];
      if (ref[i - 1] != hyp[j - 1]) best.first += 1;
      const Cost del{prev[j].first + 1, prev[j].second + 1};
      const Cost ins{cur[j - 1].first + 1, cur[j - 1].second + 1};
      if (del < best) best = del;
      if (ins < best) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

WerBreakdown compute_wer(std::span<const std::string> reference,
                         std::span<const std::string> hypothesis) {
  if (reference.empty() && !hypothesis.empty())
    throw Error(Errc::kEmptyReference,
                "WER is undefined for an empty reference");
  const auto [edits, indels] = align_cost(reference, hypothesis);
  const auto n = static_cast<std::int64_t>(reference.size());
  const auto m = static_cast<std::int64_t>(hypothesis.size());
  WerBreakdown w;
  w.ref_tokens = n;
  w.substitutions = edits - indels;
  w.insertions = (indels + (m - n)) / 2;
  w.deletions = (indels - (m - n)) / 2;
  return w;
}

std::int64_t edit_distance(std::span<const std::string> a,
                           std::span<const std::string> b) {
  return align_cost(a, b).first;
}

}  // namespace cforge
