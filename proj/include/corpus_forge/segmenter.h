// include/corpus_forge/segmenter.h

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
#include <vector>

#include "corpus_forge/vad.h"

namespace cforge {

struct Chunk {
  std::int64_t index = 0;
  int frame_count = 50;
  double voice_ratio = 0.0;
  double silence_ratio = 0.0;
  double other_ratio = 0.0;

  bool operator==(const Chunk &) const = default;
};

// Ratio windows a chunk must fall in to count as viable speech.
struct ChunkValidityConfig {
  double min_voice_ratio = 0.10;
  double max_voice_ratio = 1.00;
  double min_silence_ratio = 0.00;
  double max_silence_ratio = 0.90;
  double max_other_ratio = 0.00;

  void validate() const;
};

// Half-open [start_ms, end_ms), chunk aligned.
struct SpeechSpan {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::int64_t chunk_count = 0;

  std::int64_t duration_ms() const { return end_ms - start_ms; }
  bool operator==(const SpeechSpan &) const = default;
};

// Groups labels into chunks of `frames_per_chunk`; the trailing partial
// chunk is dropped.
std::vector<Chunk> bundle_chunks(const std::vector<FrameLabel> &labels,
                                 int frames_per_chunk);

bool is_valid(const Chunk &chunk, const ChunkValidityConfig &cfg);

// Maximal runs of valid chunks lasting at least `min_span_ms`. Runs are
// kept whole, never cut into min_span_ms pieces.
std::vector<SpeechSpan> extract_spans(const std::vector<Chunk> &chunks,
                                      const ChunkValidityConfig &cfg,
                                      std::int64_t chunk_ms,
                                      std::int64_t min_span_ms);

}  // namespace cforge
