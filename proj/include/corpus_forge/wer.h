// include/corpus_forge/wer.h

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
#include <span>
#include <string>

namespace cforge {

struct WerBreakdown {
  std::int64_t substitutions = 0;
  std::int64_t insertions = 0;
  std::int64_t deletions = 0;
  std::int64_t ref_tokens = 0;

  std::int64_t errors() const { return substitutions + insertions + deletions; }
  // (S + I + D) / N; 0 for an empty reference matched by an empty hypothesis.
  double wer() const {
    return ref_tokens == 0 ? 0.0 : static_cast<double>(errors()) / ref_tokens;
  }
  WerBreakdown &operator+=(const WerBreakdown &o) {
    substitutions += o.substitutions;
    insertions += o.insertions;
    deletions += o.deletions;
    ref_tokens += o.ref_tokens;
    return *this;
  }
  bool operator==(const WerBreakdown &) const = default;
};

// Minimal unit-cost alignment. Among minimal alignments the one with the
// most substitutions (fewest insertion+deletion pairs) is reported.
// Throws EmptyReference for an empty reference with a non-empty hypothesis.
WerBreakdown compute_wer(std::span<const std::string> reference,
                         std::span<const std::string> hypothesis);

std::int64_t edit_distance(std::span<const std::string> a,
                           std::span<const std::string> b);

}  // namespace cforge
