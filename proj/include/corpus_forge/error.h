// include/corpus_forge/error.h

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
#include <stdexcept>
#include <string>

namespace cforge {

enum class Errc {
  kInvalidArgument,
  kIo,
  // audio-io
  kFormatError,
  kUnsupportedCodec,
  kEmptyAudio,
  kEmptyFrame,
  // vad
  kTooShort,
  kFrameCountMismatch,
  kParseError,
  // segmenter / master index
  kOverlapError,
  kMissingDuration,
  // sampler
  kNoCandidates,
  kCutError,
  // ngram-lm
  kEmptyCorpus,
  kArpaCountError,
  kArpaConsistencyError,
  // ctc-decoder
  kConfigError,
  // eval
  kEmptyReference,
  kEmptyEvalSet,
  kMissingMetadata,
  kTooFewSentences,
};

const char *errc_name(Errc code);

// All toolkit failures are reported through this type. `line()` is the
// 1-based input line for parse-type errors, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &what, std::int64_t line = 0)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        line_(line) {}

  Errc code() const noexcept { return code_; }
  std::int64_t line() const noexcept { return line_; }

 private:
  Errc code_;
  std::int64_t line_;
};

}  // namespace cforge
