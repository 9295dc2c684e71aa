// src/cli/cli.cc

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

#include "corpus_forge/cli.h"

#include <omp.h>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "cli/cli_internal.h"
#include "corpus_forge/error.h"

namespace cforge::cli {

namespace fs = std::filesystem;

namespace {

bool needs_quotes(const std::string &v) {
  if (v.empty()) return true;
  for (char c : v)
    if (c == ' ' || c == '=' || c == '"' || c == '\t' || c == '\n') return true;
  return false;
}

std::string quote(const std::string &v) {
  if (!needs_quotes(v)) return v;
  std::string s = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') s += '\\';
    if (c == '\n') {
      s += "\\n";
      continue;
    }
    s += c;
  }
  return s + "\"";
}

}  // namespace

void Logger::emit(const char *level, const std::string &msg, const Fields &f) {
  std::string line = std::string("level=") + level;
  if (!cmd_.empty()) line += " cmd=" + quote(cmd_);
  line += " msg=" + quote(msg);
  for (const auto &[k, v] : f) line += " " + k + "=" + quote(v);
  err_ << line << '\n';
}

void Overrides::apply(PipelineConfig &c) const {
  if (rate) c.rate = *rate;
  if (frame_ms) c.frame_ms = *frame_ms;
  if (frames_per_chunk) c.frames_per_chunk = *frames_per_chunk;
  if (vad_level) c.vad_level = *vad_level;
  if (lm_order) c.lm_order = *lm_order;
  if (min_count) c.min_count = *min_count;
  if (beam_width) c.beam_width = *beam_width;
  if (silence_dbfs) c.silence_dbfs = *silence_dbfs;
  if (voice_threshold) c.voice_threshold = *voice_threshold;
  if (min_voice_ratio) c.validity.min_voice_ratio = *min_voice_ratio;
  if (max_voice_ratio) c.validity.max_voice_ratio = *max_voice_ratio;
  if (min_silence_ratio) c.validity.min_silence_ratio = *min_silence_ratio;
  if (max_silence_ratio) c.validity.max_silence_ratio = *max_silence_ratio;
  if (max_other_ratio) c.validity.max_other_ratio = *max_other_ratio;
  if (alpha) c.alpha = *alpha;
  if (beta) c.beta = *beta;
  if (prune_log10) c.prune_log10 = *prune_log10;
  if (no_prune) c.prune_log10.reset();
  if (min_span_ms) c.min_span_ms = *min_span_ms;
  if (span_ms) c.span_ms = *span_ms;
  if (min_support) c.min_support = *min_support;
}

void add_common_options(CLI::App *sub, Context &ctx) {
  sub->add_option("--config", ctx.config_path, "YAML pipeline config")
      ->check(CLI::ExistingFile);
  sub->add_option("--jobs", ctx.jobs,
                  "worker threads (default: logical CPU count)")
      ->check(CLI::PositiveNumber);
}

void write_file(const fs::path &path,
                const std::function<void(std::ostream &)> &body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw Error(Errc::kIo, "write failed: " + path.string());
  }
  fs::rename(tmp, path);
}

std::vector<std::string> config_comments(const PipelineConfig &cfg,
                                         const std::string &prefix) {
  std::vector<std::string> out;
  for (const auto &l : cfg.echo()) out.push_back(prefix + l);
  return out;
}

void write_config_sidecar(const fs::path &path, const PipelineConfig &cfg,
                          const std::vector<std::string> &extra_comments) {
  fs::path side = path;
  side += ".config.yaml";
  write_file(side, [&](std::ostream &o) {
    for (const auto &c : extra_comments) o << "# " << c << '\n';
    o << cfg.echo_yaml();
  });
}

nlohmann::ordered_json config_json(const PipelineConfig &cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto &line : cfg.echo()) {
    const auto colon = line.find(": ");
    j[line.substr(0, colon)] = nlohmann::ordered_json::parse(line.substr(colon + 2));
  }
  return j;
}

std::string fmt_num(double v, int precision) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"corpus-forge: speech corpus construction and ASR evaluation",
               "corpus-forge"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  Context ctx{out, Logger(err, ""), {}, {}, {}, {}};
  std::vector<Command> cmds;
  add_audio_commands(app, ctx, cmds);
  add_lm_commands(app, ctx, cmds);
  add_eval_commands(app, ctx, cmds);

  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    if (dynamic_cast<const CLI::RequiredError *>(&e) == nullptr ||
        app.get_subcommands().empty())
      err << app.help();
    return kExitUsage;
  }

  for (auto &cmd : cmds) {
    if (!cmd.app->parsed()) continue;
    ctx.log.set_command(cmd.app->get_name());
    try {
      ctx.cfg = ctx.config_path.empty() ? PipelineConfig{}
                                        : load_config_file(ctx.config_path);
      ctx.ov.apply(ctx.cfg);
      ctx.cfg.validate();
      omp_set_num_threads(ctx.jobs.value_or(omp_get_num_procs()));
      return cmd.run(ctx);
    } catch (const Error &e) {
      Logger::Fields f{{"code", errc_name(e.code())}};
      if (e.line() > 0) f.emplace_back("line", std::to_string(e.line()));
      ctx.log.error(e.what(), f);
      return kExitUsage;
    } catch (const std::exception &e) {
      ctx.log.error(e.what(), {{"code", "Internal"}});
      return kExitUsage;
    }
  }
  err << app.help();
  return kExitUsage;
}

int run(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cforge::cli
