// include/corpus_forge/cli.h

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

#include <iosfwd>
#include <string>
#include <vector>

namespace cforge::cli {

// Exit codes: 0 success, 1 some items failed (the rest were written),
// 2 usage, configuration or fatal input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

// args[0] is the program name. Data goes to `out` (or to files), logs to
// `err` as logfmt lines.
int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);
int run(int argc, char **argv);

}  // namespace cforge::cli
