// include/corpus_forge/pipeline_config.h

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
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "corpus_forge/ctc_decoder.h"
#include "corpus_forge/segmenter.h"
#include "corpus_forge/vad.h"

namespace cforge {

inline constexpr const char *kConfigVersion = "1";

// Every tunable of the pipeline in one versioned document. Loaded from
// YAML; a missing `version` or an unknown key is a ConfigError.
struct PipelineConfig {
  std::string version = kConfigVersion;
  int rate = 16000;
  int frame_ms = 20;
  int frames_per_chunk = 50;
  double silence_dbfs = -40.0;
  int vad_level = 2;
  std::optional<double> voice_threshold;  // unset: derived from vad_level
  ChunkValidityConfig validity;
  std::int64_t min_span_ms = 30000;
  std::int64_t span_ms = 30000;
  int lm_order = 4;
  int min_count = 1;
  double alpha = 0.5;
  double beta = 1.0;
  int beam_width = 16;
  std::optional<double> prune_log10 = -5.0;
  std::int64_t min_support = 10;

  VadConfig vad() const;
  std::int64_t chunk_ms() const {
    return static_cast<std::int64_t>(frame_ms) * frames_per_chunk;
  }
  void validate() const;

  // "key: value" lines in a fixed order; valid YAML that loads back to an
  // equal config.
  std::vector<std::string> echo() const;
  std::string echo_yaml() const;
};

PipelineConfig load_config(std::istream &in);
PipelineConfig load_config_file(const std::string &path);

}  // namespace cforge
