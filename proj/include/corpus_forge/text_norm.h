// include/corpus_forge/text_norm.h

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

#include <string>
#include <string_view>
#include <vector>

namespace cforge {

// Stamped into every report so numbers can be traced to the rules below.
inline constexpr const char *kNormalizationVersion = "norm-v1";

// Lowercases (ASCII and Latin-1 letters such as Å/Ä/Ö), replaces
// punctuation with spaces except an apostrophe or hyphen between two word
// characters, and collapses whitespace.
std::string normalize_text(std::string_view text);
std::vector<std::string> normalize_tokens(std::string_view text);

}  // namespace cforge
