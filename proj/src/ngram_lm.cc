// src/ngram_lm.cc

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

#include "corpus_forge/ngram_lm.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <string>

#include "corpus_forge/error.h"
#include "corpus_forge/rng.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cforge {

std::size_t NGramKeyHash::operator()(const NGramKey &k) const noexcept {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (WordId w : k) h = splitmix64_mix(h ^ w);
  return static_cast<std::size_t>(h);
}

NGramKey make_key(std::span<const WordId> words) {
  NGramKey k;
  k.fill(kNoWord);
  std::copy(words.begin(), words.end(), k.begin());
  return k;
}

int key_order(const NGramKey &k) {
  int n = 0;
  while (n < kMaxOrder && k[n] != kNoWord) ++n;
  return n;
}

Vocabulary::Vocabulary() {
  add("<unk>");
  add("<s>");
  add("</s>");
}

WordId Vocabulary::add(std::string_view word) {
  auto it = ids_.find(std::string(word));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(std::string(word), id);
  return id;
}

WordId Vocabulary::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view word) const {
  return ids_.count(std::string(word)) > 0;
}

NGramModel::NGramModel(int order) : order_(order), tables_(order) {
  if (order < 1 || order > kMaxOrder)
    throw Error(Errc::kInvalidArgument, "n-gram order must be in 1..5");
}

const NGramEntry *NGramModel::find(std::span<const WordId> words) const {
  if (words.empty() || static_cast<int>(words.size()) > order_) return nullptr;
  const auto &t = tables_[words.size() - 1];
  auto it = t.find(make_key(words));
  return it == t.end() ? nullptr : &it->second;
}

double NGramModel::log10_prob(std::span<const WordId> context,
                              WordId word) const {
  const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
  if (context.size() > max_ctx) context = context.subspan(context.size() - max_ctx);
  WordId buf[kMaxOrder];
  double backoff = 0.0;
  for (std::size_t skip = 0; skip <= context.size(); ++skip) {
    const auto ctx = context.subspan(skip);
    std::copy(ctx.begin(), ctx.end(), buf);
    buf[ctx.size()] = word;
    if (const NGramEntry *e = find(std::span<const WordId>(buf, ctx.size() + 1)))
      return backoff + e->log10_prob;
    if (!ctx.empty())
      if (const NGramEntry *c = find(ctx)) backoff += c->log10_backoff;
  }
  // Word missing from the unigrams entirely: treat as <unk>.
  if (word != kUnkId) return log10_prob(context, kUnkId);
  return backoff + kLog10Zero;
}

std::vector<std::string> tokenize_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < line.size()) {
    while (i < line.size() && space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !space(line[i])) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

namespace {

using CountMap = std::unordered_map<NGramKey, std::uint64_t, NGramKeyHash>;

void count_sentence(const std::vector<WordId> &s, int order,
                    NGramCounts &counts, std::vector<WordId> &padded) {
  padded.clear();
  padded.push_back(kBosId);
  padded.insert(padded.end(), s.begin(), s.end());
  padded.push_back(kEosId);
  for (int n = 1; n <= order; ++n) {
    if (static_cast<std::size_t>(n) > padded.size()) break;
    for (std::size_t i = 0; i + n <= padded.size(); ++i)
      ++counts[n - 1][make_key(std::span<const WordId>(&padded[i], n))];
  }
}

Discount estimate_discount(const std::vector<std::uint64_t> &adjusted, int n,
                           std::vector<std::string> &warnings) {
  std::uint64_t t[5] = {0, 0, 0, 0, 0};
  for (std::uint64_t a : adjusted)
    if (a >= 1 && a <= 4) ++t[a];
  Discount d;
  auto fallback = [&](const std::string &why) {
    d = Discount{0.75, 0.75, 0.75, true};
    warnings.push_back("order " + std::to_string(n) + ": " + why +
                       "; using fixed discount 0.75");
  };
  if (t[1] == 0 || t[2] == 0 || t[3] == 0) {
    fallback("count-of-counts n1=" + std::to_string(t[1]) +
             " n2=" + std::to_string(t[2]) + " n3=" + std::to_string(t[3]) +
             " leave the discount formula undefined");
    return d;
  }
  const double y = static_cast<double>(t[1]) / (t[1] + 2.0 * t[2]);
  d.d1 = 1.0 - 2.0 * y * t[2] / t[1];
  d.d2 = 2.0 - 3.0 * y * t[3] / t[2];
  d.d3 = 3.0 - 4.0 * y * t[4] / t[3];
  if (!(d.d1 > 0 && d.d1 <= 1 && d.d2 > 0 && d.d2 <= 2 && d.d3 > 0 &&
        d.d3 <= 3))
    fallback("estimated discounts out of range");
  return d;
}

struct ContextStats {
  std::uint64_t total = 0;                // sum of adjusted counts
  std::uint64_t n1 = 0, n2 = 0, n3 = 0;   // children with count 1, 2, 3+
  bool pruned_child = false;
  double gamma(const Discount &d) const {
    return (d.d1 * n1 + d.d2 * n2 + d.d3 * n3) / static_cast<double>(total);
  }
};

NGramKey prefix_of(const NGramKey &k, int n) {
  NGramKey p = k;
  p[n - 1] = kNoWord;
  return p;
}

NGramKey suffix_of(const NGramKey &k, int n) {
  NGramKey s;
  s.fill(kNoWord);
  std::copy(k.begin() + 1, k.begin() + n, s.begin());
  return s;
}

}  // namespace

NGramCounts count_ngrams_serial(
    const std::vector<std::vector<WordId>> &sentences, int order) {
  NGramCounts counts(order);
  std::vector<WordId> padded;
  for (const auto &s : sentences) count_sentence(s, order, counts, padded);
  return counts;
}

NGramCounts count_ngrams(const std::vector<std::vector<WordId>> &sentences,
                         int order) {
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::vector<NGramCounts> shards(threads, NGramCounts(order));
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel num_threads(threads)
  {
    int tid = 0;
#ifdef _OPENMP
    tid = omp_get_thread_num();
#endif
    std::vector<WordId> padded;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      count_sentence(sentences[i], order, shards[tid], padded);
  }
  NGramCounts merged = std::move(shards[0]);
  for (int t = 1; t < threads; ++t)
    for (int o = 0; o < order; ++o)
      for (const auto &[k, c] : shards[t][o]) merged[o][k] += c;
  return merged;
}

NGramModel train(const std::vector<std::string> &lines,
                 const TrainOptions &opts) {
  const int order = opts.order;
  NGramModel model(order);
  if (!opts.min_count.empty() &&
      opts.min_count.size() != static_cast<std::size_t>(order))
    throw Error(Errc::kInvalidArgument, "min_count needs one value per order");

  // Vocabulary ids are assigned in sorted word order so that training is
  // independent of line order.
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(lines.size());
  for (const auto &line : lines) {
    auto toks = tokenize_whitespace(line);
    std::erase_if(toks, [](const std::string &t) {
      return t == "<s>" || t == "</s>";
    });
    if (!toks.empty()) tokenized.push_back(std::move(toks));
  }
  if (tokenized.empty()) throw Error(Errc::kEmptyCorpus, "no sentences");
  {
    std::vector<std::string> words;
    for (const auto &s : tokenized) words.insert(words.end(), s.begin(), s.end());
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    for (const auto &w : words) model.mutable_vocab().add(w);
  }
  const Vocabulary &vocab = model.vocab();
  std::vector<std::vector<WordId>> sentences(tokenized.size());
  for (std::size_t i = 0; i < tokenized.size(); ++i) {
    sentences[i].reserve(tokenized[i].size());
    for (const auto &t : tokenized[i]) sentences[i].push_back(vocab.id(t));
  }

  const NGramCounts raw = count_ngrams(sentences, order);

  // Adjusted counts: raw at the top order and for n-grams starting with
  // <s>; otherwise the number of distinct left extensions.
  std::vector<CountMap> adjusted(order);
  adjusted[order - 1] = raw[order - 1];
  for (int n = order - 1; n >= 1; --n) {
    CountMap left;
    for (const auto &[k, c] : raw[n]) ++left[suffix_of(k, n + 1)];
    for (const auto &[k, c] : raw[n - 1]) {
      if (k[0] == kBosId) {
        adjusted[n - 1][k] = c;
      } else {
        auto it = left.find(k);
        adjusted[n - 1][k] = it == left.end() ? c : it->second;
      }
    }
  }
  // <s> is never predicted.
  adjusted[0].erase(make_key(std::span<const WordId>(&kBosId, 1)));

  model.discounts.resize(order);
  for (int n = 1; n <= order; ++n) {
    std::vector<std::uint64_t> values;
    values.reserve(adjusted[n - 1].size());
    for (const auto &[k, a] : adjusted[n - 1]) values.push_back(a);
    model.discounts[n - 1] = estimate_discount(values, n, model.warnings);
  }

  // Which n-grams survive min_count pruning. Prefixes and suffixes of
  // kept n-grams are always kept so the model stays ARPA-consistent.
  std::vector<std::unordered_map<NGramKey, bool, NGramKeyHash>> kept(order);
  {
    std::unordered_map<NGramKey, bool, NGramKeyHash> needed;
    for (int n = order; n >= 1; --n) {
      std::unordered_map<NGramKey, bool, NGramKeyHash> next_needed;
      const std::uint64_t threshold =
          (n >= 2 && !opts.min_count.empty()) ? opts.min_count[n - 1] : 1;
      for (const auto &[k, a] : adjusted[n - 1]) {
        const bool keep =
            n == 1 || raw[n - 1].at(k) >= threshold || needed.count(k);
        kept[n - 1][k] = keep;
        if (keep && n >= 2) {
          next_needed[prefix_of(k, n)] = true;
          next_needed[suffix_of(k, n)] = true;
        }
      }
      needed = std::move(next_needed);
    }
  }

  // Context statistics over adjusted counts, per order.
  std::vector<std::unordered_map<NGramKey, ContextStats, NGramKeyHash>> stats(
      order);
  for (int n = 1; n <= order; ++n) {
    for (const auto &[k, a] : adjusted[n - 1]) {
      ContextStats &s = stats[n - 1][prefix_of(k, n)];
      s.total += a;
      if (a == 1) ++s.n1;
      else if (a == 2) ++s.n2;
      else ++s.n3;
      if (!kept[n - 1].at(k)) s.pruned_child = true;
    }
  }

  // Unigrams: interpolate with the uniform distribution over every word
  // except <s>.
  {
    NGramTable &uni = model.mutable_table(1);
    const Discount &d = model.discounts[0];
    const ContextStats &root = stats[0][make_key({})];
    const double gamma = root.gamma(d);
    const double uniform = 1.0 / static_cast<double>(vocab.size() - 1);
    for (WordId w = 0; w < vocab.size(); ++w) {
      const NGramKey k = make_key(std::span<const WordId>(&w, 1));
      if (w == kBosId) {
        uni[k].log10_prob = kLog10Zero;
        continue;
      }
      auto it = adjusted[0].find(k);
      const double a = it == adjusted[0].end() ? 0.0 : static_cast<double>(it->second);
      const double u = a > 0 ? (a - d(it->second)) / root.total : 0.0;
      uni[k].log10_prob = std::log10(u + gamma * uniform);
    }
  }

  for (int n = 2; n <= order; ++n) {
    NGramTable &table = model.mutable_table(n);
    const NGramTable &lower = model.table(n - 1);
    const Discount &d = model.discounts[n - 1];
    for (const auto &[k, a] : adjusted[n - 1]) {
      if (!kept[n - 1].at(k)) continue;
      const ContextStats &s = stats[n - 1].at(prefix_of(k, n));
      const double u = (a - d(a)) / static_cast<double>(s.total);
      const double lower_p = std::pow(10.0, lower.at(suffix_of(k, n)).log10_prob);
      table[k].log10_prob = std::log10(u + s.gamma(d) * lower_p);
    }
  }

  // Back-off weights, lowest order first so pruned contexts can query the
  // already-finished lower orders.
  for (int n = 2; n <= order; ++n) {
    const Discount &d = model.discounts[n - 1];
    NGramTable &ctx_table = model.mutable_table(n - 1);
    std::unordered_map<NGramKey, std::pair<double, double>, NGramKeyHash> kept_mass;
    for (const auto &[k, a] : adjusted[n - 1]) {
      if (!kept[n - 1].at(k)) continue;
      const NGramKey ctx = prefix_of(k, n);
      if (!stats[n - 1].at(ctx).pruned_child) continue;
      auto &m = kept_mass[ctx];
      m.first += std::pow(10.0, model.table(n).at(k).log10_prob);
      WordId words[kMaxOrder];
      std::copy(k.begin(), k.begin() + n, words);
      m.second += std::pow(
          10.0, model.log10_prob(std::span<const WordId>(words + 1, n - 2),
                                 words[n - 1]));
    }
    for (const auto &[ctx, s] : stats[n - 1]) {
      auto it = ctx_table.find(ctx);
      if (it == ctx_table.end()) continue;
      double bo;
      if (!s.pruned_child) {
        bo = s.gamma(d);
      } else {
        const auto m = kept_mass[ctx];
        bo = (1.0 - m.first) / (1.0 - m.second);
      }
      it->second.log10_backoff = std::log10(bo);
    }
  }
  return model;
}

NGramModel train(std::istream &corpus, const TrainOptions &opts) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(corpus, line)) lines.push_back(std::move(line));
  return train(lines, opts);
}

double score(const NGramModel &model, const std::vector<std::string> &tokens) {
  std::vector<WordId> history{kBosId};
  double total = 0.0;
  for (const auto &t : tokens) {
    const WordId w = model.vocab().id(t);
    total += model.log10_prob(history, w);
    history.push_back(w);
  }
  return total + model.log10_prob(history, kEosId);
}

PerplexityResult perplexity(const NGramModel &model,
                            const std::vector<std::string> &lines) {
  PerplexityResult r;
  for (const auto &line : lines) {
    const auto toks = tokenize_whitespace(line);
    if (toks.empty()) continue;
    for (const auto &t : toks)
      if (!model.vocab().contains(t)) ++r.oov;
    r.total_log10 += score(model, toks);
    r.tokens += static_cast<std::int64_t>(toks.size()) + 1;
    ++r.sentences;
  }
  if (r.sentences == 0) throw Error(Errc::kEmptyCorpus, "no sentences");
  r.perplexity = std::pow(10.0, -r.total_log10 / static_cast<double>(r.tokens));
  return r;
}

}  // namespace cforge
