// src/error.cc

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

#include "corpus_forge/error.h"

namespace cforge {

const char *errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kIo: return "IoError";
    case Errc::kFormatError: return "FormatError";
    case Errc::kUnsupportedCodec: return "UnsupportedCodec";
    case Errc::kEmptyAudio: return "EmptyAudio";
    case Errc::kEmptyFrame: return "EmptyFrame";
    case Errc::kTooShort: return "TooShort";
    case Errc::kFrameCountMismatch: return "FrameCountMismatch";
    case Errc::kParseError: return "ParseError";
    case Errc::kOverlapError: return "OverlapError";
    case Errc::kMissingDuration: return "MissingDuration";
    case Errc::kNoCandidates: return "NoCandidates";
    case Errc::kCutError: return "CutError";
    case Errc::kEmptyCorpus: return "EmptyCorpus";
    case Errc::kArpaCountError: return "ArpaCountError";
    case Errc::kArpaConsistencyError: return "ArpaConsistencyError";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kEmptyReference: return "EmptyReference";
    case Errc::kEmptyEvalSet: return "EmptyEvalSet";
    case Errc::kMissingMetadata: return "MissingMetadata";
    case Errc::kTooFewSentences: return "TooFewSentences";
  }
  return "Unknown";
}

}  // namespace cforge
