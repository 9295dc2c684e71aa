// src/segmenter.cc

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

#include "corpus_forge/segmenter.h"

#include "corpus_forge/error.h"

namespace cforge {

void ChunkValidityConfig::validate() const {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(min_voice_ratio) || !in_unit(max_voice_ratio) ||
      !in_unit(min_silence_ratio) || !in_unit(max_silence_ratio) ||
      !in_unit(max_other_ratio))
    throw Error(Errc::kInvalidArgument, "chunk ratio bounds must be in [0,1]");
  if (min_voice_ratio > max_voice_ratio ||
      min_silence_ratio > max_silence_ratio)
    throw Error(Errc::kInvalidArgument, "chunk ratio bounds need min <= max");
}

std::vector<Chunk> bundle_chunks(const std::vector<FrameLabel> &labels,
                                 int frames_per_chunk) {
  if (frames_per_chunk < 1)
    throw Error(Errc::kInvalidArgument, "frames_per_chunk must be >= 1");
  const std::size_t per = static_cast<std::size_t>(frames_per_chunk);
  const std::size_t n = labels.size() / per;
  std::vector<Chunk> chunks;
  chunks.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    int counts[3] = {0, 0, 0};
    for (std::size_t f = c * per; f < (c + 1) * per; ++f)
      ++counts[static_cast<int>(labels[f].label)];
    const double denom = frames_per_chunk;
    chunks.push_back(Chunk{static_cast<std::int64_t>(c), frames_per_chunk,
                           counts[0] / denom, counts[1] / denom,
                           counts[2] / denom});
  }
  return chunks;
}

bool is_valid(const Chunk &chunk, const ChunkValidityConfig &cfg) {
  return chunk.other_ratio <= cfg.max_other_ratio &&
         chunk.voice_ratio >= cfg.min_voice_ratio &&
         chunk.voice_ratio <= cfg.max_voice_ratio &&
         chunk.silence_ratio >= cfg.min_silence_ratio &&
         chunk.silence_ratio <= cfg.max_silence_ratio;
}

std::vector<SpeechSpan> extract_spans(const std::vector<Chunk> &chunks,
                                      const ChunkValidityConfig &cfg,
                                      std::int64_t chunk_ms,
                                      std::int64_t min_span_ms) {
  cfg.validate();
  if (chunk_ms <= 0)
    throw Error(Errc::kInvalidArgument, "chunk duration must be positive");
  if (min_span_ms < 0 || min_span_ms % chunk_ms != 0)
    throw Error(Errc::kInvalidArgument,
                "min_span_ms must be a multiple of the chunk duration");
  const std::int64_t min_chunks = std::max<std::int64_t>(1, min_span_ms / chunk_ms);

  std::vector<SpeechSpan> spans;
  std::int64_t run_start = -1;
  auto close_run = [&](std::int64_t end_chunk) {
    if (run_start < 0) return;
    const std::int64_t count = end_chunk - run_start;
    if (count >= min_chunks)
      spans.push_back(
          SpeechSpan{run_start * chunk_ms, end_chunk * chunk_ms, count});
    run_start = -1;
  };
  std::int64_t prev = -1;
  for (const Chunk &c : chunks) {
    // A gap in chunk indices breaks a run just like an invalid chunk.
    if (run_start >= 0 && c.index != prev + 1) close_run(prev + 1);
    if (is_valid(c, cfg)) {
      if (run_start < 0) run_start = c.index;
    } else {
      close_run(c.index);
    }
    prev = c.index;
  }
  if (!chunks.empty()) close_run(chunks.back().index + 1);
  return spans;
}

}  // namespace cforge
