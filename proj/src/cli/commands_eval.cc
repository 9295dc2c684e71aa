// src/cli/commands_eval.cc

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

// eval, split and report.

#include <fstream>
#include <map>
#include <memory>
#include <set>

#include "cli/cli_internal.h"
#include "corpus_forge/error.h"
#include "corpus_forge/eval.h"
#include "corpus_forge/master_index.h"
#include "corpus_forge/text_norm.h"

namespace cforge::cli {

using nlohmann::ordered_json;

namespace {

std::vector<EvalRecord> load_records(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  return read_eval_records(in);
}

// Report JSON with the effective config first.
ordered_json with_config(const PipelineConfig &cfg, const ordered_json &body) {
  ordered_json j;
  j["config"] = config_json(cfg);
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = *it;
  return j;
}

void emit_json(const std::string &path, const ordered_json &j) {
  write_file(path, [&](std::ostream &out) { out << j.dump(2) << '\n'; });
}

struct EvalOpts {
  std::string records, stratify, out;
};

int run_eval(Context &ctx, const EvalOpts &o) {
  const auto records = load_records(o.records);
  if (o.stratify.empty()) {
    const auto total = aggregate(records);
    std::set<std::string> splits;
    for (const auto &r : records) {
      auto it = r.metadata.find("split");
      splits.insert(it == r.metadata.end() ? "unspecified" : it->second);
    }
    render_text(ctx.out, total, static_cast<std::int64_t>(records.size()));
    if (!o.out.empty()) {
      ordered_json body;
      body["normalization"] = kNormalizationVersion;
      body["splits"] = splits;
      body["records"] = records.size();
      body["overall"] = to_json(total);
      emit_json(o.out, with_config(ctx.cfg, body));
    }
    ctx.log.info("evaluated", {{"records", std::to_string(records.size())},
                               {"wer", fmt_num(total.wer(), 6)}});
    return kExitOk;
  }
  const auto rep = stratified_report(records, o.stratify, ctx.cfg.min_support);
  render_text(ctx.out, rep);
  if (!o.out.empty()) emit_json(o.out, with_config(ctx.cfg, to_json(rep)));
  ctx.log.info("evaluated", {{"records", std::to_string(records.size())},
                             {"groups", std::to_string(rep.groups.size())},
                             {"wer", fmt_num(rep.overall.wer(), 6)}});
  return kExitOk;
}

struct SplitOpts {
  std::string in, out;
  double fraction = 0.02;
  std::uint64_t seed = 0;
};

int run_split(Context &ctx, const SplitOpts &o) {
  std::ifstream in(o.in);
  if (!in) throw Error(Errc::kIo, "cannot open " + o.in);
  const auto rows = read_split_rows(in);
  const auto res = split_by_sentence(rows, o.fraction, o.seed);
  auto body = [&](std::ostream &out) {
    for (const auto &c : config_comments(ctx.cfg, "# ")) out << c << '\n';
    out << "# test_fraction: " << fmt_num(o.fraction, 6) << '\n'
        << "# seed: " << o.seed << '\n'
        << "# unique_sentences: " << res.unique_sentences << '\n'
        << "# test_sentences: " << res.test_sentences << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i)
      out << rows[i].id << '\t' << (res.row_is_test[i] ? "test" : "train") << '\n';
  };
  if (o.out.empty())
    body(ctx.out);
  else
    write_file(o.out, body);
  ctx.log.info("split", {{"rows", std::to_string(rows.size())},
                         {"unique_sentences", std::to_string(res.unique_sentences)},
                         {"test_sentences", std::to_string(res.test_sentences)},
                         {"test_rows", std::to_string(res.test_ids.size())}});
  return kExitOk;
}

struct ReportOpts {
  std::string index, durations, records, rows = "region", cols = "model", out;
};

int report_corpus(Context &ctx, const ReportOpts &o) {
  std::ifstream in(o.index);
  if (!in) throw Error(Errc::kIo, "cannot open " + o.index);
  const auto index = parse_master_index(in, ctx.cfg.chunk_ms());
  const std::string dur_path =
      o.durations.empty() ? o.index + ".durations" : o.durations;
  std::ifstream din(dur_path);
  if (!din) throw Error(Errc::kIo, "cannot open " + dur_path);
  const auto durations = parse_durations(din);
  const double ratio = speech_ratio(index, durations);

  struct Channel {
    std::set<std::string> files;
    std::int64_t spans = 0, speech_ms = 0;
  };
  std::map<std::string, Channel> channels;
  std::int64_t speech_ms = 0, audio_ms = 0;
  for (const auto &e : index) {
    auto &c = channels[e.channel];
    c.files.insert(e.file_path);
    ++c.spans;
    c.speech_ms += e.span.duration_ms();
    speech_ms += e.span.duration_ms();
  }
  for (const auto &[_, ms] : durations) audio_ms += ms;
  auto hours = [](std::int64_t ms) { return fmt_num(ms / 3.6e6, 3); };

  ctx.out << "channel\tfiles\tspans\tspeech_h\n";
  for (const auto &[name, c] : channels)
    ctx.out << name << '\t' << c.files.size() << '\t' << c.spans << '\t'
            << hours(c.speech_ms) << '\n';
  ctx.out << "# files: " << durations.size() << '\n'
          << "# audio_h: " << hours(audio_ms) << '\n'
          << "# speech_h: " << hours(speech_ms) << '\n'
          << "# speech_ratio: " << fmt_num(ratio, 4) << '\n';

  if (!o.out.empty()) {
    ordered_json body;
    body["files"] = durations.size();
    body["audio_ms"] = audio_ms;
    body["speech_ms"] = speech_ms;
    body["speech_ratio"] = ratio;
    ordered_json ch = ordered_json::object();
    for (const auto &[name, c] : channels)
      ch[name] = {{"files", c.files.size()}, {"spans", c.spans},
                  {"speech_ms", c.speech_ms}};
    body["channels"] = ch;
    emit_json(o.out, with_config(ctx.cfg, body));
  }
  ctx.log.info("corpus report", {{"speech_ratio", fmt_num(ratio, 4)}});
  return kExitOk;
}

int report_grid(Context &ctx, const ReportOpts &o) {
  const auto records = load_records(o.records);
  const auto rep = grid_report(records, o.rows, o.cols, ctx.cfg.min_support);
  render_text(ctx.out, rep);
  if (!o.out.empty()) emit_json(o.out, with_config(ctx.cfg, to_json(rep)));
  ctx.log.info("grid report", {{"rows", std::to_string(rep.rows.size())},
                               {"cols", std::to_string(rep.cols.size())}});
  return kExitOk;
}

}  // namespace

void add_eval_commands(CLI::App &app, Context &ctx, std::vector<Command> &cmds) {
  {
    auto o = std::make_shared<EvalOpts>();
    auto *sub = app.add_subcommand("eval", "pooled WER, optionally stratified");
    add_common_options(sub, ctx);
    sub->add_option("--records", o->records, "JSONL eval records")
        ->required()->check(CLI::ExistingFile);
    sub->add_option("--stratify", o->stratify, "metadata key to group by");
    sub->add_option("--min-support", ctx.ov.min_support,
                    "groups with fewer records are flagged low-support");
    sub->add_option("--out", o->out, "JSON report");
    cmds.push_back({sub, [o](Context &c) { return run_eval(c, *o); }});
  }
  {
    auto o = std::make_shared<SplitOpts>();
    auto *sub = app.add_subcommand("split", "train/test split by unique sentence");
    add_common_options(sub, ctx);
    sub->add_option("--in", o->in, "TSV id<TAB>sentence[<TAB>speaker[<TAB>region]]")
        ->required()->check(CLI::ExistingFile);
    sub->add_option("--test-fraction", o->fraction, "share of unique sentences held out")
        ->capture_default_str();
    sub->add_option("--seed", o->seed, "64-bit seed")->required();
    sub->add_option("--out", o->out, "id<TAB>side file (default: stdout)");
    cmds.push_back({sub, [o](Context &c) { return run_split(c, *o); }});
  }
  {
    auto o = std::make_shared<ReportOpts>();
    auto *sub = app.add_subcommand(
        "report", "corpus statistics (--index) or a WER grid (--records)");
    add_common_options(sub, ctx);
    auto *idx = sub->add_option("--index", o->index, "master index")
                    ->check(CLI::ExistingFile);
    sub->add_option("--durations", o->durations,
                    "duration table (default: <index>.durations)");
    auto *rec = sub->add_option("--records", o->records, "JSONL eval records")
                    ->check(CLI::ExistingFile);
    idx->excludes(rec);
    sub->add_option("--rows", o->rows, "grid row key")->capture_default_str();
    sub->add_option("--cols", o->cols, "grid column key")->capture_default_str();
    sub->add_option("--min-support", ctx.ov.min_support);
    sub->add_option("--out", o->out, "JSON report");
    cmds.push_back({sub, [o](Context &c) {
                      if (!o->index.empty()) return report_corpus(c, *o);
                      if (o->records.empty())
                        throw Error(Errc::kConfigError,
                                    "report needs --index or --records");
                      return report_grid(c, *o);
                    }});
  }
}

}  // namespace cforge::cli
