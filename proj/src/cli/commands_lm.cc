// src/cli/commands_lm.cc

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

// lm-train, lm-eval and decode.

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>

#include "cli/cli_internal.h"
#include "corpus_forge/ctc_decoder.h"
#include "corpus_forge/error.h"
#include "corpus_forge/ngram_lm.h"

namespace cforge::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

NGramModel load_arpa(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  return read_arpa(in);
}

std::vector<std::string> read_lines(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

struct TrainOpts {
  std::string in, out;
};

int run_lm_train(Context &ctx, const TrainOpts &o) {
  TrainOptions opts;
  opts.order = ctx.cfg.lm_order;
  if (ctx.cfg.min_count > 1) {
    opts.min_count.assign(opts.order, static_cast<std::uint64_t>(ctx.cfg.min_count));
    opts.min_count[0] = 1;
  }
  const auto model = train(read_lines(o.in), opts);
  for (const auto &w : model.warnings) ctx.log.warn(w);
  const auto comments = config_comments(ctx.cfg, "# ");
  if (o.out.empty())
    write_arpa(ctx.out, model, comments);
  else
    write_file(o.out, [&](std::ostream &out) { write_arpa(out, model, comments); });
  Logger::Fields f{{"order", std::to_string(model.order())}};
  for (int n = 1; n <= model.order(); ++n)
    f.emplace_back("ngram" + std::to_string(n),
                   std::to_string(model.table(n).size()));
  ctx.log.info("model trained", f);
  return kExitOk;
}

struct EvalOpts {
  std::string arpa, in, out;
};

int run_lm_eval(Context &ctx, const EvalOpts &o) {
  const auto model = load_arpa(o.arpa);
  const auto res = perplexity(model, read_lines(o.in));
  ordered_json j;
  j["config"] = config_json(ctx.cfg);
  j["arpa"] = o.arpa;
  j["perplexity"] = res.perplexity;
  j["total_log10"] = res.total_log10;
  j["tokens"] = res.tokens;
  j["sentences"] = res.sentences;
  j["oov"] = res.oov;
  if (o.out.empty())
    ctx.out << j.dump(2) << '\n';
  else
    write_file(o.out, [&](std::ostream &out) { out << j.dump(2) << '\n'; });
  ctx.log.info("perplexity", {{"ppl", fmt_num(res.perplexity, 4)},
                              {"oov", std::to_string(res.oov)}});
  return kExitOk;
}

struct Reference {
  std::string text;
  std::map<std::string, std::string> metadata;
};

// id<TAB>reference[<TAB>key=value]...
std::map<std::string, Reference> read_refs(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  std::map<std::string, Reference> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    for (;;) {
      const auto tab = line.find('\t', pos);
      f.push_back(line.substr(pos, tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (f.size() < 2 || f[0].empty())
      throw Error(Errc::kParseError, "expected id<TAB>reference", lineno);
    Reference r{f[1], {}};
    for (std::size_t i = 2; i < f.size(); ++i) {
      const auto eq = f[i].find('=');
      if (eq == std::string::npos || eq == 0)
        throw Error(Errc::kParseError, "metadata must be key=value", lineno);
      r.metadata[f[i].substr(0, eq)] = f[i].substr(eq + 1);
    }
    if (!out.emplace(f[0], std::move(r)).second)
      throw Error(Errc::kParseError, "duplicate id " + f[0], lineno);
  }
  return out;
}

std::vector<fs::path> posterior_files(const std::vector<std::string> &args) {
  std::vector<fs::path> out;
  for (const auto &a : args) {
    if (!fs::is_directory(a)) {
      out.emplace_back(a);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto &e : fs::directory_iterator(a))
      if (e.is_regular_file() && e.path().extension() == ".post")
        found.push_back(e.path());
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

struct DecodeOpts {
  std::vector<std::string> post;
  std::string arpa, refs, out;
};

int run_decode(Context &ctx, const DecodeOpts &o) {
  const auto &cfg = ctx.cfg;
  FusionConfig fc;
  fc.beam_width = cfg.beam_width;
  fc.prune_log10 = cfg.prune_log10;
  std::unique_ptr<NGramModel> lm;
  if (!o.arpa.empty()) {
    lm = std::make_unique<NGramModel>(load_arpa(o.arpa));
    fc.alpha = cfg.alpha;
    fc.beta = cfg.beta;
  } else if (ctx.ov.alpha || ctx.ov.beta) {
    throw Error(Errc::kConfigError, "--alpha/--beta need --arpa");
  }
  std::map<std::string, Reference> refs;
  if (!o.refs.empty()) refs = read_refs(o.refs);

  const auto files = posterior_files(o.post);
  struct Result {
    std::string id;
    Hypothesis best;
    std::string error;
  };
  std::vector<Result> results(files.size());
  const auto n = static_cast<std::int64_t>(files.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    auto &r = results[i];
    r.id = files[i].stem().string();
    try {
      std::ifstream in(files[i]);
      if (!in) throw Error(Errc::kIo, "cannot open " + files[i].string());
      const auto post = read_posteriors(in);
      r.best = beam_decode(post, fc, lm.get()).front();
    } catch (const std::exception &e) {
      r.error = e.what();
    }
  }

  int failed = 0;
  std::string body;
  for (const auto &r : results) {
    if (!r.error.empty()) {
      ctx.log.error("decode failed", {{"utterance_id", r.id}, {"error", r.error}});
      ++failed;
      continue;
    }
    ordered_json j;
    j["utterance_id"] = r.id;
    j["hypothesis"] = r.best.text;
    j["ctc_log10"] = r.best.ctc_log10;
    j["lm_log10"] = r.best.lm_log10;
    j["total"] = r.best.total;
    if (!o.refs.empty()) {
      auto it = refs.find(r.id);
      if (it == refs.end()) {
        ctx.log.error("no reference", {{"utterance_id", r.id}});
        ++failed;
        continue;
      }
      j["reference"] = it->second.text;
      ordered_json m = ordered_json::object();
      for (const auto &[k, v] : it->second.metadata) m[k] = v;
      j["metadata"] = m;
    }
    body += j.dump() + "\n";
  }
  if (o.out.empty()) {
    ctx.out << body;
  } else {
    write_file(o.out, [&](std::ostream &out) { out << body; });
    write_config_sidecar(o.out, ctx.cfg,
                         {"arpa: " + (o.arpa.empty() ? "none" : o.arpa)});
  }
  ctx.log.info("decoded", {{"utterances", std::to_string(files.size() - failed)},
                           {"failed", std::to_string(failed)},
                           {"lm", o.arpa.empty() ? "none" : o.arpa}});
  return failed ? kExitPartial : kExitOk;
}

}  // namespace

void add_lm_commands(CLI::App &app, Context &ctx, std::vector<Command> &cmds) {
  {
    auto o = std::make_shared<TrainOpts>();
    auto *sub = app.add_subcommand("lm-train", "train a modified Kneser-Ney ARPA model");
    add_common_options(sub, ctx);
    sub->add_option("--in", o->in, "text, one sentence per line")
        ->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "ARPA file (default: stdout)");
    sub->add_option("--order", ctx.ov.lm_order, "n-gram order, 1-5");
    sub->add_option("--min-count", ctx.ov.min_count,
                    "drop n-grams (order >= 2) seen fewer times");
    cmds.push_back({sub, [o](Context &c) { return run_lm_train(c, *o); }});
  }
  {
    auto o = std::make_shared<EvalOpts>();
    auto *sub = app.add_subcommand("lm-eval", "perplexity of a text under an ARPA model");
    add_common_options(sub, ctx);
    sub->add_option("--arpa", o->arpa)->required()->check(CLI::ExistingFile);
    sub->add_option("--in", o->in)->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "JSON result (default: stdout)");
    cmds.push_back({sub, [o](Context &c) { return run_lm_eval(c, *o); }});
  }
  {
    auto o = std::make_shared<DecodeOpts>();
    auto *sub = app.add_subcommand("decode", "CTC beam search with optional LM fusion");
    add_common_options(sub, ctx);
    sub->add_option("--post", o->post, "posterior files or directories of *.post")
        ->required();
    sub->add_option("--arpa", o->arpa, "language model for shallow fusion")
        ->check(CLI::ExistingFile);
    sub->add_option("--alpha", ctx.ov.alpha, "LM weight (needs --arpa)");
    sub->add_option("--beta", ctx.ov.beta, "word insertion bonus (needs --arpa)");
    sub->add_option("--beam", ctx.ov.beam_width, "beam width");
    sub->add_option("--prune-log10", ctx.ov.prune_log10,
                    "skip symbols with log10 posterior below this");
    sub->add_flag("--no-prune", ctx.ov.no_prune, "consider every symbol");
    sub->add_option("--refs", o->refs,
                    "TSV id<TAB>reference[<TAB>key=value...] to emit eval records")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "JSONL output (default: stdout)");
    cmds.push_back({sub, [o](Context &c) { return run_decode(c, *o); }});
  }
}

}  // namespace cforge::cli
