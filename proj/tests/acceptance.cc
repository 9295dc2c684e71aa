// tests/acceptance.cc

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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Each check drives the toolkit the way a user would (mostly
// through the CLI entry point) and compares against independent oracles.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unistd.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "json.hpp"
#include "oracles.h"
#include "pipeline_fixture.h"
#include "support.h"
#include "toy_instances.h"

#include "corpus_forge/cli.h"
#include "corpus_forge/ctc_decoder.h"
#include "corpus_forge/eval.h"
#include "corpus_forge/master_index.h"
#include "corpus_forge/ngram_lm.h"
#include "corpus_forge/sampler.h"
#include "corpus_forge/text_norm.h"
#include "corpus_forge/wer.h"

namespace fs = std::filesystem;
using namespace cforge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Thrown by the checks below with a one-line reason.
struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string &why) {
  if (!ok) throw Failed(why);
}

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string run_cli(std::vector<std::string> args, int want = cli::kExitOk) {
  args.insert(args.begin(), "corpus-forge");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != want) {
    std::string cmd;
    for (const auto &a : args) cmd += " " + a;
    throw Failed("exit " + std::to_string(code) + " from" + cmd + ": " + err.str());
  }
  return out.str();
}

std::vector<MasterIndexEntry> read_index(const fs::path &p) {
  std::ifstream in(p);
  return parse_master_index(in);
}

// ---- 1
std::string archive_recovery() {
  cft::TempDir d;
  const auto files = cft::three_file_archive();
  cft::write_archive(d.path(), files);
  const auto t0 = Clock::now();
  run_cli({"scan", "--in", (d / "audio").string(), "--index", (d / "index.tsv").string(),
           "--backend", "file:" + (d / "labels").string()});
  const double secs = seconds_since(t0);
  const auto got = read_index(d / "index.tsv");
  std::size_t i = 0, want = 0;
  for (const auto &f : files) {
    for (auto [s, e] : cft::planted_spans(f)) {
      ++want;
      expect(i < got.size(), "too few spans");
      const auto &g = got[i++];
      expect(g.file_path == f.rel, "span in wrong file: " + g.file_path);
      expect(std::abs(g.span.start_ms - s) <= 1000 && std::abs(g.span.end_ms - e) <= 1000,
             f.rel + ": span [" + std::to_string(g.span.start_ms) + ", " +
                 std::to_string(g.span.end_ms) + ") vs planted [" + std::to_string(s) + ", " +
                 std::to_string(e) + ")");
    }
  }
  expect(got.size() == want, "found " + std::to_string(got.size()) + " spans, planted " +
                                 std::to_string(want));
  expect(secs < 10.0, "scan took " + fmt("%.2f s", secs));
  return std::to_string(want) + " spans recovered, scan " + fmt("%.2f s", secs);
}

// ---- 2
std::string speech_ratio_check() {
  cft::TempDir d;
  cft::write_archive(d.path(), cft::half_speech_archive());
  run_cli({"scan", "--in", (d / "audio").string(), "--index", (d / "index.tsv").string(),
           "--backend", "file:" + (d / "labels").string()});
  std::ifstream din(d / "index.tsv.durations");
  const double r = speech_ratio(read_index(d / "index.tsv"), parse_durations(din));
  const auto report = run_cli({"report", "--index", (d / "index.tsv").string()});
  expect(report.find("speech_ratio") != std::string::npos, "report lacks speech_ratio");
  expect(std::abs(r - 0.5) <= 0.02, "speech_ratio " + fmt("%.4f", r));
  return "speech_ratio " + fmt("%.4f", r);
}

// ---- 3
std::string sampler_check() {
  cft::TempDir d;
  const MasterIndexEntry span{"p1/2024-01-01/long.wav", "p1", "2024-01-01", {0, 600000, 600}};
  {
    std::ofstream out(d / "index.tsv");
    write_master_index(out, {span});
  }
  for (const char *sub : {"a", "b"})
    run_cli({"sample", "--index", (d / "index.tsv").string(), "--hours", "0.1", "--span-ms",
             "30000", "--seed", "2024", "--out", (d / sub).string()});
  const auto m = cft::slurp(d / "a" / "manifest.jsonl");
  expect(m == cft::slurp(d / "b" / "manifest.jsonl"), "manifests differ between runs");
  std::istringstream min(m);
  const auto entries = parse_manifest(min);
  expect(entries.size() == 12, "placements: " + std::to_string(entries.size()));
  std::set<std::int64_t> starts;
  for (const auto &e : entries) {
    expect(e.cut_end_ms - e.cut_start_ms == 30000 && e.cut_start_ms % 30000 == 0,
           "misaligned placement");
    starts.insert(e.cut_start_ms);
  }
  expect(starts.size() == 12, "overlapping placements");

  // Every seed includes 12 of the 20 slots. For sampling k of n uniformly
  // without replacement the inclusion indicators have variance p(1-p) and
  // covariance -p(1-p)/(n-1), so scaling the usual statistic by (n-1)/n
  // over N p (1-p) gives a chi-square with n-1 degrees of freedom.
  const int n = 20, k = 12, seeds = 10000;
  std::vector<double> hits(n, 0.0);
  SampleRequest req;
  req.target_hours = 0.1;
  for (int s = 0; s < seeds; ++s) {
    req.seed = static_cast<std::uint64_t>(s);
    for (const auto &e : sample_corpus({span}, req).entries) hits[e.cut_start_ms / 30000] += 1;
  }
  const double p = static_cast<double>(k) / n;
  double x2 = 0;
  for (double h : hits) x2 += (h - seeds * p) * (h - seeds * p);
  x2 *= (n - 1.0) / n / (seeds * p * (1 - p));
  const double pval = boost::math::cdf(boost::math::complement(boost::math::chi_squared(n - 1), x2));
  expect(pval > 0.01, "chi-square p = " + fmt("%.4g", pval));
  return "12 placements, identical manifests, chi-square p = " + fmt("%.3f", pval);
}

// ---- 4
std::string ctc_oracle() {
  CounterRng rng(404);
  const auto t0 = Clock::now();
  double worst = 0;
  FusionConfig cfg;
  cfg.beam_width = 4096;
  cfg.prune_log10.reset();
  for (int trial = 0; trial < 200; ++trial) {
    const int T = 1 + static_cast<int>(rng.uniform(6));
    const int V = 2 + static_cast<int>(rng.uniform(3));
    CtcPosteriors p;
    p.frames = T;
    p.symbols = V;
    for (int v = 0; v < V; ++v) p.alphabet.push_back(v ? std::string(1, char('a' + v - 1)) : "_");
    for (int t = 0; t < T; ++t) {
      std::vector<double> row(V);
      double s = 0;
      for (auto &x : row) s += (x = 0.01 + rng.uniform01());
      for (auto &x : row) p.probs.push_back(x / s);
    }
    const auto truth = oracle::ctc_marginals(p.probs, T, V, p.blank);
    const auto hyps = beam_decode(p, cfg, nullptr);
    expect(hyps.size() == truth.size(), "trial " + std::to_string(trial) + ": " +
                                            std::to_string(hyps.size()) + " hypotheses, " +
                                            std::to_string(truth.size()) + " label strings");
    for (const auto &h : hyps)
      worst = std::max(worst, std::abs(std::pow(10.0, h.ctc_log10) - truth.at(h.labels)));
  }
  const double secs = seconds_since(t0);
  expect(worst <= 1e-9, "max probability error " + fmt("%.3g", worst));
  expect(secs < 60, "took " + fmt("%.1f s", secs));
  return "max error " + fmt("%.2g", worst) + ", " + fmt("%.2f s", secs);
}

// ---- 5
double lp(const NGramModel &m, const std::vector<std::string> &ctx, const std::string &w) {
  std::vector<WordId> ids;
  for (const auto &c : ctx) ids.push_back(m.vocab().id(c));
  return m.log10_prob(ids, m.vocab().id(w));
}

std::string lm_check() {
  TrainOptions o;
  // Hand-computed unigram model with proper discounts: counts a4 b3 c2 d1
  // e1 f1 </s>2 give D = 3/7, 19/14, 9/7 and P = x/392 below.
  o.order = 1;
  const auto uni = train(std::vector<std::string>{"a a a a b b b c c d", "e f"}, o);
  const std::vector<std::pair<std::string, double>> want1{
      {"a", 99}, {"b", 71}, {"c", 41}, {"</s>", 41}, {"d", 39}, {"e", 39}, {"f", 39}, {"<unk>", 23}};
  for (const auto &[w, x] : want1)
    expect(std::abs(lp(uni, {}, w) - std::log10(x / 392)) < 1e-9, "unigram " + w);
  // Bigram model on "a b": every order falls back to D = 0.75.
  o.order = 2;
  const auto bi = train(std::vector<std::string>{"a b"}, o);
  expect(std::abs(lp(bi, {}, "a") - std::log10(13.0 / 48)) < 1e-9, "P(a)");
  expect(std::abs(lp(bi, {}, "<unk>") - std::log10(9.0 / 48)) < 1e-9, "P(<unk>)");
  expect(std::abs(lp(bi, {"a"}, "b") - std::log10(0.453125)) < 1e-9, "P(b | a)");
  expect(std::abs(lp(bi, {"a"}, "a") - std::log10(0.75 * 13.0 / 48)) < 1e-9, "P(a | a)");

  // Round trip and normalization on a larger random trigram model.
  CounterRng rng(505);
  const std::vector<std::string> words{"en", "purpur", "aprikos", "nektarin", "god", "och", "gul"};
  std::vector<std::string> lines;
  for (int i = 0; i < 300; ++i) {
    std::string s;
    const int len = 1 + static_cast<int>(rng.uniform(8));
    for (int j = 0; j < len; ++j) s += (j ? " " : "") + words[rng.uniform(words.size())];
    lines.push_back(s);
  }
  o.order = 3;
  const auto m = train(lines, o);
  std::stringstream arpa;
  write_arpa(arpa, m);
  const auto back = read_arpa(arpa);
  double worst_rt = 0;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> probe;
    const int len = 1 + static_cast<int>(rng.uniform(6));
    for (int j = 0; j < len; ++j)
      probe.push_back(rng.uniform(10) == 0 ? "okänd" : words[rng.uniform(words.size())]);
    worst_rt = std::max(worst_rt, std::abs(score(m, probe) - score(back, probe)));
  }
  expect(worst_rt <= 1e-4, "ARPA round trip drift " + fmt("%.3g", worst_rt));
  double worst_mass = 0;
  const auto nv = static_cast<WordId>(m.vocab().size());
  for (int i = 0; i < 100; ++i) {
    std::vector<WordId> ctx(rng.uniform(3));
    for (auto &w : ctx) w = static_cast<WordId>(rng.uniform(nv));
    double s = 0;
    for (WordId w = 0; w < nv; ++w)
      if (w != kBosId) s += std::pow(10.0, m.log10_prob(ctx, w));
    worst_mass = std::max(worst_mass, std::abs(s - 1.0));
  }
  expect(worst_mass <= 1e-6, "a context sums to 1 +- " + fmt("%.3g", worst_mass));
  return "hand values exact, round trip " + fmt("%.2g", worst_rt) + ", mass error " +
         fmt("%.2g", worst_mass);
}

// ---- 6
std::string fusion_flip() {
  const auto p = toy::aprik_posteriors();
  const auto lm = toy::aprik_lm();
  const auto greedy = greedy_decode(p);
  const auto plain = beam_decode(p, FusionConfig{0.0, 0.0, 64, -5.0}, &lm);
  const auto fused = beam_decode(p, FusionConfig{2.0, 0.0, 64, -5.0}, &lm);
  expect(greedy == "aprik aprik", "greedy gave '" + greedy + "'");
  expect(plain[0].text == greedy, "alpha 0 gave '" + plain[0].text + "'");
  expect(fused[0].text == "aprikos", "alpha 2 gave '" + fused[0].text + "'");
  return "alpha 0: '" + plain[0].text + "', alpha 2: '" + fused[0].text + "'";
}

// ---- 7
std::string wer_oracle() {
  auto toks = [](const std::string &s) { return tokenize_whitespace(s); };
  auto wer_of = [&](const std::string &r, const std::string &h) {
    const auto a = toks(r), b = toks(h);
    return compute_wer(a, b);
  };
  expect(wer_of("the cat sat on mat", "the cat sat on mat") == WerBreakdown{0, 0, 0, 5},
         "identical pair");
  const auto w2 = wer_of("a b c", "a x c d");
  expect(w2 == WerBreakdown{1, 1, 0, 3} && std::abs(w2.wer() - 2.0 / 3) < 1e-15,
         "substitution plus insertion");
  expect(wer_of("a b c", "").wer() == 1.0, "total deletion");

  CounterRng rng(707);
  const char *vocab[] = {"a", "b", "c", "d", "e"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> r(1 + rng.uniform(10)), h(rng.uniform(11));
    for (auto &x : r) x = vocab[rng.uniform(5)];
    for (auto &x : h) x = vocab[rng.uniform(5)];
    const auto w = compute_wer(r, h);
    const int o = oracle::edit_distance(r, h);
    expect(w.errors() == o && edit_distance(r, h) == o,
           "pair " + std::to_string(i) + ": " + std::to_string(w.errors()) + " vs oracle " +
               std::to_string(o));
  }
  return "3 examples, 1000 oracle pairs";
}

// ---- 8
std::string split_hygiene() {
  cft::TempDir d;
  CounterRng rng(808);
  std::vector<std::string> sentences;
  {
    std::ofstream out(d / "rows.tsv");
    for (int i = 0; i < 1000; ++i) {
      std::string s;
      if (i > 0 && rng.uniform(10) == 0) {
        s = sentences[rng.uniform(sentences.size())];
      } else {
        s = "Mening nummer " + std::to_string(i) + ", läst högt.";
      }
      sentences.push_back(s);
      out << "utt" << i << '\t' << s << "\tspk" << rng.uniform(40) << "\tregion" << i % 5 << '\n';
    }
  }
  const auto text = run_cli({"split", "--in", (d / "rows.tsv").string(), "--test-fraction",
                             "0.02", "--seed", "8"});
  std::set<std::string> test, train, unique;
  std::istringstream in(text);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const auto id = std::stoul(line.substr(3, tab - 3));
    const auto norm = normalize_text(sentences.at(id));
    (line.substr(tab + 1) == "test" ? test : train).insert(norm);
    unique.insert(norm);
    ++rows;
  }
  expect(rows == 1000, "rows out: " + std::to_string(rows));
  for (const auto &s : test) expect(!train.count(s), "sentence on both sides: " + s);
  const auto want = static_cast<std::size_t>(std::ceil(0.02 * unique.size()));
  expect(test.size() == want, std::to_string(test.size()) + " test sentences, want " +
                                  std::to_string(want));
  return std::to_string(unique.size()) + " unique, " + std::to_string(test.size()) +
         " held out, no overlap";
}

// ---- 9
std::string grid_check() {
  cft::TempDir d;
  const std::vector<std::string> regions{"Gotland", "Norrland", "Skåne", "Stockholm"};
  const std::vector<std::string> models{"base", "lm"};
  // Planted rate per cell: (2 + r + 3m) errors per 40 tokens; one sparse cell.
  std::map<std::pair<std::string, std::string>, double> planted;
  {
    std::ofstream out(d / "records.jsonl");
    int id = 0;
    for (std::size_t r = 0; r < regions.size(); ++r)
      for (std::size_t m = 0; m < models.size(); ++m) {
        const int errs = static_cast<int>(2 + r + 3 * m);
        planted[{regions[r], models[m]}] = errs / 40.0;
        const int count = (r == 0 && m == 1) ? 4 : 15;
        for (int k = 0; k < count; ++k) {
          std::vector<std::string> ref, hyp;
          for (int t = 0; t < 40; ++t) {
            ref.push_back("w" + std::to_string(t));
            hyp.push_back(t < errs ? "x" + std::to_string(t) : ref.back());
          }
          out << nlohmann::json{{"utterance_id", "u" + std::to_string(id++)},
                                {"reference", ref},
                                {"hypothesis", hyp},
                                {"metadata", {{"region", regions[r]}, {"model", models[m]}}}}
                     .dump()
              << '\n';
        }
      }
  }
  run_cli({"report", "--records", (d / "records.jsonl").string(), "--rows", "region", "--cols",
           "model", "--out", (d / "grid.json").string()});
  const auto j = nlohmann::json::parse(cft::slurp(d / "grid.json"));
  for (const auto &[cell, rate] : planted) {
    const auto &c = j.at("cells").at(cell.first).at(cell.second);
    const auto &w = c.at("wer");
    expect(w.get<double>() == rate, cell.first + "/" + cell.second + ": " +
                                        fmt("%.6f", w.get<double>()) + " vs " + fmt("%.6f", rate));
    const bool sparse = cell == std::make_pair(regions[0], models[1]);
    expect(c.at("low_support").get<bool>() == sparse, "low-support flag on " + cell.first);
  }
  return "8 cells exact, 1 low-support cell flagged";
}

// ---- 10
void list_files(const fs::path &root, std::map<std::string, std::string> &out) {
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = cft::slurp(e.path());
}

std::map<std::string, std::string> pipeline_run(const fs::path &dir, const fs::path &audio,
                                                const std::string &jobs) {
  fs::create_directories(dir);
  const auto cwd = fs::current_path();
  fs::current_path(dir);
  try {
    run_cli({"scan", "--jobs", jobs, "--in", audio.string(), "--index", "index.tsv"});
    run_cli({"sample", "--jobs", jobs, "--index", "index.tsv", "--hours", "0.05", "--seed", "10",
             "--out", "corpus", "--audio-root", audio.string()});
    std::ifstream min("corpus/manifest.jsonl");
    const auto manifest = parse_manifest(min);
    fs::create_directories("post");
    {
      std::ofstream refs("refs.tsv"), text("lm.txt");
      for (const auto &e : manifest) {
        CounterRng rng(fnv1a64(e.source_path) ^ static_cast<std::uint64_t>(e.cut_start_ms));
        const auto sentence = cft::fixture_sentence(rng);
        const std::string id = "s" + std::to_string(e.sample_id);
        std::ofstream post("post/" + id + ".post");
        write_posteriors(post, cft::spell_posteriors(sentence, rng.next()));
        refs << id << '\t' << sentence << "\tchannel=" << e.channel << '\n';
        text << sentence << '\n';
      }
    }
    run_cli({"lm-train", "--jobs", jobs, "--in", "lm.txt", "--out", "lm.arpa", "--order", "3"});
    run_cli({"decode", "--jobs", jobs, "--post", "post", "--arpa", "lm.arpa", "--refs", "refs.tsv",
             "--out", "decoded.jsonl"});
    const auto report = run_cli({"eval", "--jobs", jobs, "--records", "decoded.jsonl",
                                 "--stratify", "channel", "--min-support", "2", "--out",
                                 "eval.json"});
    std::ofstream("eval.txt") << report;
  } catch (...) {
    fs::current_path(cwd);
    throw;
  }
  fs::current_path(cwd);
  std::map<std::string, std::string> files;
  list_files(dir, files);
  return files;
}

std::string pipeline_determinism() {
  cft::TempDir d;
  cft::write_archive(d.path(), cft::three_file_archive());
  const auto audio = d / "audio";
  const auto a = pipeline_run(d / "run1", audio, "1");
  const auto b = pipeline_run(d / "run2", audio, "1");
  const auto c = pipeline_run(d / "run8", audio, "8");
  expect(a.size() > 10, "pipeline wrote only " + std::to_string(a.size()) + " files");
  for (const auto *other : {&b, &c}) {
    expect(other->size() == a.size(), "different file sets");
    for (const auto &[name, body] : a) {
      auto it = other->find(name);
      expect(it != other->end() && it->second == body, name + " differs");
    }
  }
  const auto j = nlohmann::json::parse(a.at("eval.json"));
  return std::to_string(a.size()) + " files identical; pooled WER " +
         fmt("%.4f", j.at("overall").at("wer").get<double>());
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"synthetic archive recovery", archive_recovery},
      {"speech ratio", speech_ratio_check},
      {"sampler determinism and coverage", sampler_check},
      {"CTC beam search vs brute force", ctc_oracle},
      {"Kneser-Ney values, ARPA round trip, normalization", lm_check},
      {"LM fusion flips aprik aprik to aprikos", fusion_flip},
      {"WER vs recursive edit distance", wer_oracle},
      {"sentence-disjoint split", split_hygiene},
      {"stratified region x model grid", grid_check},
      {"end-to-end determinism across runs and thread counts", pipeline_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      detail = criteria[i].second();
      ok = true;
    } catch (const std::exception &e) {
      detail = e.what();
    }
    failures += !ok;
    std::printf("%s %2zu  %s: %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
