// include/corpus_forge/ngram_lm.h

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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cforge {

using WordId = std::uint32_t;

inline constexpr int kMaxOrder = 5;
inline constexpr WordId kNoWord = 0xFFFFFFFFu;
inline constexpr WordId kUnkId = 0;
inline constexpr WordId kBosId = 1;
inline constexpr WordId kEosId = 2;
// ARPA convention for "probability zero" (used for <s>).
inline constexpr double kLog10Zero = -99.0;

// N-gram of up to kMaxOrder words, unused tail slots hold kNoWord.
using NGramKey = std::array<WordId, kMaxOrder>;

struct NGramKeyHash {
  std::size_t operator()(const NGramKey &k) const noexcept;
};

NGramKey make_key(std::span<const WordId> words);
int key_order(const NGramKey &k);

class Vocabulary {
 public:
  Vocabulary();  // seeds <unk>, <s>, </s> at ids 0, 1, 2

  WordId add(std::string_view word);
  // <unk> for anything not in the vocabulary.
  WordId id(std::string_view word) const;
  bool contains(std::string_view word) const;
  const std::string &word(WordId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> ids_;
};

struct NGramEntry {
  double log10_prob = 0.0;
  double log10_backoff = 0.0;
};

using NGramTable = std::unordered_map<NGramKey, NGramEntry, NGramKeyHash>;
using NGramCounts = std::vector<std::unordered_map<NGramKey, std::uint64_t, NGramKeyHash>>;

// Discounts for counts 1, 2 and 3+ at one order.
struct Discount {
  double d1 = 0.75, d2 = 0.75, d3 = 0.75;
  bool fallback = false;
  double operator()(std::uint64_t count) const {
    return count == 1 ? d1 : count == 2 ? d2 : d3;
  }
};

// Back-off n-gram model in log10 space. Immutable after training or
// loading; concurrent queries are safe.
class NGramModel {
 public:
  NGramModel() = default;
  explicit NGramModel(int order);

  int order() const { return order_; }
  const Vocabulary &vocab() const { return vocab_; }
  Vocabulary &mutable_vocab() { return vocab_; }

  const NGramTable &table(int n) const { return tables_[n - 1]; }
  NGramTable &mutable_table(int n) { return tables_[n - 1]; }
  const NGramEntry *find(std::span<const WordId> words) const;

  // log10 P(word | context) via back-off; only the last order-1 context
  // words matter.
  double log10_prob(std::span<const WordId> context, WordId word) const;

  // Discounts used in training (empty for models read from ARPA).
  std::vector<Discount> discounts;
  std::vector<std::string> warnings;

 private:
  int order_ = 0;
  Vocabulary vocab_;
  std::vector<NGramTable> tables_;
};

struct TrainOptions {
  int order = 4;
  // Raw-count threshold per order (index n-1); orders >= 2 below it are
  // dropped unless a kept higher-order n-gram needs them. Empty = keep all.
  std::vector<std::uint64_t> min_count;
};

// Interpolated modified Kneser-Ney. Lines are whitespace-tokenized
// sentences; blank lines are skipped. Throws EmptyCorpus.
NGramModel train(const std::vector<std::string> &lines,
                 const TrainOptions &opts);
NGramModel train(std::istream &corpus, const TrainOptions &opts);

// Raw n-gram counts of <s>-padded, </s>-terminated sentences, orders
// 1..order. count_ngrams() shards sentences over OpenMP threads and merges
// the integer tables; count_ngrams_serial() is the reference.
NGramCounts count_ngrams(const std::vector<std::vector<WordId>> &sentences,
                         int order);
NGramCounts count_ngrams_serial(
    const std::vector<std::vector<WordId>> &sentences, int order);

std::vector<std::string> tokenize_whitespace(std::string_view line);

// Sum of log10 P over tokens plus </s>, starting from <s>.
double score(const NGramModel &model, const std::vector<std::string> &tokens);

struct PerplexityResult {
  double perplexity = 0.0;
  double total_log10 = 0.0;
  std::int64_t tokens = 0;     // words + one </s> per sentence
  std::int64_t sentences = 0;
  std::int64_t oov = 0;
};

// Throws EmptyCorpus when no non-blank line is present.
PerplexityResult perplexity(const NGramModel &model,
                            const std::vector<std::string> &lines);

// ARPA text. Lines in `comments` are written before \data\ (readers skip
// everything up to \data\).
void write_arpa(std::ostream &out, const NGramModel &model,
                const std::vector<std::string> &comments = {});
// Throws ArpaCountError, ArpaConsistencyError or ParseError.
NGramModel read_arpa(std::istream &in);

}  // namespace cforge
