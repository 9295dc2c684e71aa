// include/corpus_forge/ctc_decoder.h

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

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpus_forge/ngram_lm.h"

namespace cforge {

// T x V row-major matrix of per-frame label probabilities.
struct CtcPosteriors {
  std::size_t frames = 0;
  std::size_t symbols = 0;
  std::vector<double> probs;
  std::vector<std::string> alphabet;
  int blank = 0;
  int separator = -1;  // word separator symbol, -1 when absent

  double at(std::size_t t, std::size_t v) const { return probs[t * symbols + v]; }
  std::span<const double> row(std::size_t t) const {
    return {probs.data() + t * symbols, symbols};
  }
  // Throws InvalidArgument unless rows sum to 1 within 1e-5, T >= 1 and
  // blank/separator are valid indices.
  void validate() const;
};

// Text layout: `T V blank_index sep_index`, then the V alphabet symbols on
// one line, then T rows of V probabilities.
CtcPosteriors read_posteriors(std::istream &in);
void write_posteriors(std::ostream &out, const CtcPosteriors &post);

// Separators become word boundaries; words are joined by single spaces.
std::string labels_to_text(const CtcPosteriors &post,
                           std::span<const int> labels);

// Per-frame argmax (ties go to the lowest index), repeats collapsed,
// blanks dropped.
std::vector<int> greedy_labels(const CtcPosteriors &post);
std::string greedy_decode(const CtcPosteriors &post);

struct FusionConfig {
  double alpha = 0.0;   // LM weight
  double beta = 0.0;    // per-word bonus
  int beam_width = 16;
  // Symbols with log10 p below this are skipped at a frame; nullopt
  // disables pruning. The frame's best symbol is always admitted.
  std::optional<double> prune_log10 = -5.0;
};

struct Hypothesis {
  std::vector<int> labels;
  std::string text;
  double ctc_log10 = 0.0;  // log10 of the summed alignment probability
  double lm_log10 = 0.0;   // includes </s>
  int word_count = 0;
  double total = 0.0;      // ctc_log10 + alpha * lm_log10 + beta * word_count
};

// CTC prefix beam search with word-level shallow fusion. Each prefix
// carries its blank/non-blank summed probabilities and their best-path
// counterparts; beams are pruned on the best-path score (so width 1 is
// greedy decoding) while the returned ctc_log10 is the summed one. Words
// are scored by the LM when a separator completes them, and the trailing
// word plus </s> at the end. Output is sorted by total, best first.
// Throws ConfigError on alpha > 0 without an LM, alpha < 0 or width < 1.
std::vector<Hypothesis> beam_decode(const CtcPosteriors &post,
                                    const FusionConfig &cfg,
                                    const NGramModel *lm);

}  // namespace cforge
