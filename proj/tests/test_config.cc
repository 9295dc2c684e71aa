// tests/test_config.cc

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

#include <sstream>

#include "doctest.h"
#include "support.h"

#include "corpus_forge/pipeline_config.h"

using namespace cforge;

namespace {

PipelineConfig from(const std::string &yaml) {
  std::istringstream in(yaml);
  return load_config(in);
}

std::int64_t error_line(const std::string &yaml) {
  try {
    from(yaml);
  } catch (const Error &e) {
    CHECK(e.code() == Errc::kConfigError);
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("defaults") {
  const PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.rate == 16000);
  CHECK(c.chunk_ms() == 1000);
  CHECK(c.min_span_ms == 30000);
  CHECK(c.lm_order == 4);
  CHECK(c.beam_width == 16);
  CHECK(c.vad().level == 2);
  const auto minimal = from("version: \"1\"\n");
  CHECK(minimal.echo() == c.echo());
}

TEST_CASE("loaded values override defaults") {
  const auto c = from("version: \"1\"\nalpha: 1.25\nprune_log10: null\nvad_level: 4\nmin_span_ms: 5000\n");
  CHECK(c.alpha == 1.25);
  CHECK_FALSE(c.prune_log10.has_value());
  CHECK(c.vad().level == 4);
  CHECK(c.min_span_ms == 5000);
  CHECK(c.beta == 1.0);
}

TEST_CASE("rejections") {
  CHECK(error_line("version: \"1\"\nrate: 16000\nbogus_key: 3\n") == 3);
  CHECK(cft::error_code_of([] { from("rate: 16000\n"); }) == Errc::kConfigError);
  CHECK(cft::error_code_of([] { from("version: \"2\"\n"); }) == Errc::kConfigError);
  CHECK(cft::error_code_of([] { from("version: \"1\"\nrate: fast\n"); }) == Errc::kConfigError);
  CHECK(cft::error_code_of([] { from("version: \"1\"\nmin_span_ms: 1500\n"); }) ==
        Errc::kConfigError);
  CHECK(cft::error_code_of([] { from("version: \"1\"\nvad_level: 9\n"); }) == Errc::kConfigError);
  CHECK(cft::error_code_of([] { from("- a\n- b\n"); }) == Errc::kConfigError);
}

TEST_CASE("echo loads back to the same config") {
  PipelineConfig c;
  c.alpha = 0.1;  // not exactly representable
  c.silence_dbfs = -37.3;
  c.voice_threshold = 0.61;
  c.validity.max_other_ratio = 0.05;
  c.prune_log10.reset();
  c.min_support = 3;
  const auto text = c.echo_yaml();
  const auto back = from(text);
  CHECK(back.echo_yaml() == text);
  CHECK(back.alpha == c.alpha);
  CHECK(back.silence_dbfs == c.silence_dbfs);
}
