// src/cli/cli_internal.h

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
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "corpus_forge/cli.h"
#include "corpus_forge/pipeline_config.h"

namespace cforge::cli {

// logfmt on stderr: level=info cmd=scan msg=... key=value ...
class Logger {
 public:
  using Fields = std::vector<std::pair<std::string, std::string>>;

  Logger(std::ostream &err, std::string cmd) : err_(err), cmd_(std::move(cmd)) {}

  void info(const std::string &msg, const Fields &f = {}) { emit("info", msg, f); }
  void warn(const std::string &msg, const Fields &f = {}) { emit("warn", msg, f); }
  void error(const std::string &msg, const Fields &f = {}) { emit("error", msg, f); }

  void set_command(std::string cmd) { cmd_ = std::move(cmd); }

 private:
  void emit(const char *level, const std::string &msg, const Fields &f);

  std::ostream &err_;
  std::string cmd_;
};

// Flags that override config-file values; unset flags leave them alone.
struct Overrides {
  std::optional<int> rate, frame_ms, frames_per_chunk, vad_level, lm_order,
      min_count, beam_width;
  std::optional<double> silence_dbfs, voice_threshold, min_voice_ratio,
      max_voice_ratio, min_silence_ratio, max_silence_ratio, max_other_ratio,
      alpha, beta, prune_log10;
  std::optional<std::int64_t> min_span_ms, span_ms, min_support;
  bool no_prune = false;

  void apply(PipelineConfig &cfg) const;
};

struct Context {
  std::ostream &out;
  Logger log;
  std::string config_path;
  std::optional<int> jobs;
  Overrides ov;
  PipelineConfig cfg;
};

struct Command {
  CLI::App *app = nullptr;
  std::function<int(Context &)> run;
};

// Each adds its subcommand(s) to `app` with options bound to `ctx`.
void add_audio_commands(CLI::App &app, Context &ctx, std::vector<Command> &cmds);
void add_lm_commands(CLI::App &app, Context &ctx, std::vector<Command> &cmds);
void add_eval_commands(CLI::App &app, Context &ctx, std::vector<Command> &cmds);

// --config and --jobs, shared by every subcommand.
void add_common_options(CLI::App *sub, Context &ctx);

// Writes through a temporary sibling and renames, creating parent
// directories. Throws kIo.
void write_file(const std::filesystem::path &path,
                const std::function<void(std::ostream &)> &body);

// The effective config as comment lines with the given prefix.
std::vector<std::string> config_comments(const PipelineConfig &cfg,
                                         const std::string &prefix);

// Writes `<path>.config.yaml` beside formats that have no comment syntax.
void write_config_sidecar(const std::filesystem::path &path,
                          const PipelineConfig &cfg,
                          const std::vector<std::string> &extra_comments = {});

// The effective config as a JSON object, for reports.
nlohmann::ordered_json config_json(const PipelineConfig &cfg);

std::string fmt_num(double v, int precision = 6);

}  // namespace cforge::cli
