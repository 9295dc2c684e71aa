// src/cli/commands_audio.cc

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

// scan, vad and sample: archive audio to master index to corpus.

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <regex>

#include "cli/cli_internal.h"
#include "corpus_forge/audio_io.h"
#include "corpus_forge/error.h"
#include "corpus_forge/master_index.h"
#include "corpus_forge/sampler.h"
#include "corpus_forge/segmenter.h"
#include "corpus_forge/vad.h"

namespace cforge::cli {

namespace fs = std::filesystem;

namespace {

void add_vad_overrides(CLI::App *sub, Overrides &ov) {
  sub->add_option("--rate", ov.rate, "canonical sample rate (Hz)");
  sub->add_option("--frame-ms", ov.frame_ms, "analysis frame length");
  sub->add_option("--level", ov.vad_level, "VAD level 0-4");
  sub->add_option("--silence-dbfs", ov.silence_dbfs,
                  "frames below this level are silence");
  sub->add_option("--voice-threshold", ov.voice_threshold,
                  "voice probability cut (overrides --level)");
}

struct ArchiveMeta {
  std::string channel;
  std::string date;
};

std::map<std::string, ArchiveMeta> read_metadata(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  std::map<std::string, ArchiveMeta> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw Error(Errc::kParseError, "expected path<TAB>channel<TAB>date",
                  lineno);
    ArchiveMeta m{line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)};
    if (!is_iso_date(m.date))
      throw Error(Errc::kParseError, "bad date '" + m.date + "'", lineno);
    out[line.substr(0, t1)] = m;
  }
  return out;
}

// Without a metadata table: the channel is the top-level directory and the
// date the first YYYY-MM-DD found in the path.
std::optional<ArchiveMeta> infer_metadata(const std::string &rel) {
  static const std::regex kDate(R"((\d{4}-\d{2}-\d{2}))");
  ArchiveMeta m;
  const auto slash = rel.find('/');
  m.channel = slash == std::string::npos ? "unknown" : rel.substr(0, slash);
  std::smatch match;
  auto begin = rel.cbegin();
  while (std::regex_search(begin, rel.cend(), match, kDate)) {
    if (is_iso_date(match[1].str())) {
      m.date = match[1].str();
      return m;
    }
    begin = match[0].second;
  }
  return std::nullopt;
}

std::vector<std::string> list_wavs(const fs::path &root) {
  if (!fs::is_directory(root))
    throw Error(Errc::kIo, "not a directory: " + root.string());
  std::vector<std::string> out;
  for (const auto &e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav")
      out.push_back(fs::relative(e.path(), root).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// "builtin" or "file:<path>".
struct BackendSpec {
  bool builtin = true;
  fs::path path;
};

BackendSpec parse_backend(const std::string &s) {
  if (s == "builtin") return {};
  if (s.rfind("file:", 0) == 0 && s.size() > 5) return {false, s.substr(5)};
  throw Error(Errc::kConfigError,
              "backend must be 'builtin' or 'file:<path>', got '" + s + "'");
}

std::vector<FrameLabel> label_frames(const AudioBuffer &audio,
                                     const PipelineConfig &cfg,
                                     const BackendSpec &backend,
                                     const fs::path &labels_path) {
  const auto params = FrameParams::make(cfg.rate, cfg.frame_ms);
  if (backend.builtin)
    return classify_frames(audio, params, cfg.vad(), BuiltinVoiceDetector{});
  std::ifstream in(labels_path);
  if (!in) throw Error(Errc::kIo, "cannot open labels " + labels_path.string());
  const auto frames =
      static_cast<std::int64_t>(audio.samples.size() / params.samples_per_frame);
  return ingest_external_labels(in, frames, cfg.vad());
}

struct ScanOpts {
  std::string in, index, durations, metadata, backend = "builtin";
};

int run_scan(Context &ctx, const ScanOpts &o) {
  const auto &cfg = ctx.cfg;
  const auto backend = parse_backend(o.backend);
  std::map<std::string, ArchiveMeta> meta;
  if (!o.metadata.empty()) meta = read_metadata(o.metadata);
  const auto files = list_wavs(o.in);
  ctx.log.info("scanning", {{"files", std::to_string(files.size())},
                            {"backend", o.backend}});

  struct Result {
    std::vector<MasterIndexEntry> entries;
    std::int64_t total_ms = -1;
    std::string error;
  };
  std::vector<Result> results(files.size());
  const auto n = static_cast<std::int64_t>(files.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::string &rel = files[i];
    Result &r = results[i];
    try {
      std::optional<ArchiveMeta> m;
      if (auto it = meta.find(rel); it != meta.end()) m = it->second;
      else m = infer_metadata(rel);
      if (!m) throw Error(Errc::kMissingMetadata, "no broadcast date for " + rel);
      const auto audio = load_audio_file(fs::path(o.in) / rel, cfg.rate);
      const auto labels = label_frames(audio, cfg, backend,
                                       backend.path / (rel + ".labels"));
      const auto chunks = bundle_chunks(labels, cfg.frames_per_chunk);
      for (const auto &span :
           extract_spans(chunks, cfg.validity, cfg.chunk_ms(), cfg.min_span_ms))
        r.entries.push_back({rel, m->channel, m->date, span});
      r.total_ms = audio.duration_ms();
    } catch (const std::exception &e) {
      r.error = e.what();
    }
  }

  std::vector<MasterIndexEntry> index;
  std::map<std::string, std::int64_t> durations;
  int failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!results[i].error.empty()) {
      ctx.log.error("file failed", {{"file", files[i]}, {"error", results[i].error}});
      ++failed;
      continue;
    }
    durations[files[i]] = results[i].total_ms;
    index.insert(index.end(), results[i].entries.begin(), results[i].entries.end());
  }
  const auto comments = config_comments(cfg, "config ");
  write_file(o.index, [&](std::ostream &out) {
    write_master_index(out, index, comments);
  });
  const std::string dur_path =
      o.durations.empty() ? o.index + ".durations" : o.durations;
  write_file(dur_path, [&](std::ostream &out) { write_durations(out, durations); });

  Logger::Fields f{{"spans", std::to_string(index.size())},
                   {"files_ok", std::to_string(durations.size())},
                   {"files_failed", std::to_string(failed)}};
  if (!durations.empty())
    f.emplace_back("speech_ratio", fmt_num(speech_ratio(index, durations), 4));
  ctx.log.info("index written", f);
  return failed ? kExitPartial : kExitOk;
}

struct VadOpts {
  std::string in, out, backend = "builtin";
};

int run_vad(Context &ctx, const VadOpts &o) {
  const auto backend = parse_backend(o.backend);
  const auto audio = load_audio_file(o.in, ctx.cfg.rate);
  const auto labels = label_frames(audio, ctx.cfg, backend, backend.path);
  std::int64_t voice = 0, silence = 0;
  for (const auto &l : labels) {
    voice += l.label == FrameClass::kVoice;
    silence += l.label == FrameClass::kSilence;
  }
  if (o.out.empty()) {
    write_labels(ctx.out, labels);
  } else {
    write_file(o.out, [&](std::ostream &out) { write_labels(out, labels); });
    write_config_sidecar(o.out, ctx.cfg, {"source: " + o.in, "backend: " + o.backend});
  }
  ctx.log.info("frames labelled",
               {{"frames", std::to_string(labels.size())},
                {"voice", std::to_string(voice)},
                {"silence", std::to_string(silence)},
                {"other", std::to_string(labels.size() - voice - silence)}});
  return kExitOk;
}

struct SampleOpts {
  std::string index, out, audio_root, from, to;
  double hours = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> channels;
};

int run_sample(Context &ctx, const SampleOpts &o) {
  std::ifstream in(o.index);
  if (!in) throw Error(Errc::kIo, "cannot open index " + o.index);
  const auto index = parse_master_index(in, ctx.cfg.chunk_ms());

  SampleRequest req;
  req.target_hours = o.hours;
  req.span_ms = ctx.cfg.span_ms;
  req.seed = o.seed;
  req.channels = o.channels;
  if (!o.from.empty()) req.date_from = o.from;
  if (!o.to.empty()) req.date_to = o.to;
  req.validate();
  const auto res = sample_corpus(index, req);

  const fs::path out_dir = o.out;
  const fs::path manifest = out_dir / "manifest.jsonl";
  write_file(manifest, [&](std::ostream &out) { write_manifest(out, res.entries); });
  write_config_sidecar(
      manifest, ctx.cfg,
      {"hours: " + fmt_num(o.hours, 6), "seed: " + std::to_string(o.seed),
       "filter: " + req.filter_description(),
       "effective_seed: " + std::to_string(req.effective_seed())});
  Logger::Fields f{{"entries", std::to_string(res.entries.size())},
                   {"total_ms", std::to_string(res.total_ms)}};
  if (res.saturated)
    ctx.log.warn("candidate placements exhausted before target", f);
  else
    ctx.log.info("manifest written", f);

  if (o.audio_root.empty()) return kExitOk;
  const auto cut = cut_samples(res.entries, o.audio_root, out_dir, ctx.cfg.rate);
  for (const auto &fail : cut.failures)
    ctx.log.error("cut failed", {{"sample_id", std::to_string(fail.sample_id)},
                                 {"error", fail.message}});
  ctx.log.info("samples cut", {{"written", std::to_string(cut.written)},
                               {"failed", std::to_string(cut.failures.size())}});
  return cut.failures.empty() ? kExitOk : kExitPartial;
}

}  // namespace

void add_audio_commands(CLI::App &app, Context &ctx, std::vector<Command> &cmds) {
  {
    auto o = std::make_shared<ScanOpts>();
    auto *sub = app.add_subcommand("scan", "detect speech spans and write the master index");
    add_common_options(sub, ctx);
    sub->add_option("--in", o->in, "archive root (searched for *.wav)")->required();
    sub->add_option("--index", o->index, "master index to write")->required();
    sub->add_option("--durations", o->durations,
                    "per-file duration table (default: <index>.durations)");
    sub->add_option("--metadata", o->metadata,
                    "TSV path<TAB>channel<TAB>date; otherwise inferred from paths");
    sub->add_option("--backend", o->backend,
                    "builtin, or file:<dir> with <dir>/<relpath>.labels");
    add_vad_overrides(sub, ctx.ov);
    sub->add_option("--frames-per-chunk", ctx.ov.frames_per_chunk);
    sub->add_option("--min-span-ms", ctx.ov.min_span_ms);
    sub->add_option("--min-voice-ratio", ctx.ov.min_voice_ratio);
    sub->add_option("--max-voice-ratio", ctx.ov.max_voice_ratio);
    sub->add_option("--min-silence-ratio", ctx.ov.min_silence_ratio);
    sub->add_option("--max-silence-ratio", ctx.ov.max_silence_ratio);
    sub->add_option("--max-other-ratio", ctx.ov.max_other_ratio);
    cmds.push_back({sub, [o](Context &c) { return run_scan(c, *o); }});
  }
  {
    auto o = std::make_shared<VadOpts>();
    auto *sub = app.add_subcommand("vad", "label the frames of one file");
    add_common_options(sub, ctx);
    sub->add_option("--in", o->in, "WAVE file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "label file (default: stdout)");
    sub->add_option("--backend", o->backend, "builtin, or file:<labels>");
    add_vad_overrides(sub, ctx.ov);
    cmds.push_back({sub, [o](Context &c) { return run_vad(c, *o); }});
  }
  {
    auto o = std::make_shared<SampleOpts>();
    auto *sub = app.add_subcommand("sample", "draw a random corpus from the master index");
    add_common_options(sub, ctx);
    sub->add_option("--index", o->index, "master index")->required()->check(CLI::ExistingFile);
    sub->add_option("--hours", o->hours, "target corpus size")->required();
    sub->add_option("--seed", o->seed, "64-bit seed")->required();
    sub->add_option("--span-ms", ctx.ov.span_ms, "sample length");
    sub->add_option("--channel", o->channels, "keep only these channels (repeatable)");
    sub->add_option("--from", o->from, "first broadcast date, YYYY-MM-DD");
    sub->add_option("--to", o->to, "last broadcast date, YYYY-MM-DD");
    sub->add_option("--out", o->out, "output directory")->required();
    sub->add_option("--audio-root", o->audio_root,
                    "archive root; when given, samples are cut to <out>");
    sub->add_option("--rate", ctx.ov.rate, "output sample rate");
    cmds.push_back({sub, [o](Context &c) { return run_sample(c, *o); }});
  }
}

}  // namespace cforge::cli
