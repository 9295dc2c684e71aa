// src/ctc_decoder.cc

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

#include "corpus_forge/ctc_decoder.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "corpus_forge/error.h"

namespace cforge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct PrefixNode {
  int parent = -1;
  int label = -1;
  double lm_log10 = 0.0;
  int words = 0;
  std::vector<WordId> context;  // last order-1 words, starts with <s>
  std::string partial;          // characters of the unfinished word
};

struct PathScores {
  double pb = kNegInf, pnb = kNegInf;  // summed, natural log
  double vb = kNegInf, vnb = kNegInf;  // best single path, natural log
};

class PrefixTrie {
 public:
  PrefixTrie(const CtcPosteriors &post, const NGramModel *lm)
      : post_(post), lm_(lm) {
    PrefixNode root;
    root.context.push_back(kBosId);
    nodes_.push_back(std::move(root));
  }

  int child(int parent, int label) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(parent) << 32) | static_cast<std::uint32_t>(label);
    auto it = children_.find(key);
    if (it != children_.end()) return it->second;
    PrefixNode node = nodes_[parent];
    node.parent = parent;
    node.label = label;
    if (label == post_.separator) {
      complete_word(node);
    } else {
      node.partial += post_.alphabet[label];
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(node));
    children_.emplace(key, id);
    return id;
  }

  const PrefixNode &node(int id) const { return nodes_[id]; }

  // LM score and word count once the utterance ends here.
  std::pair<double, int> finish(int id) const {
    PrefixNode n = nodes_[id];
    complete_word(n);
    double lm = n.lm_log10;
    if (lm_) lm += lm_->log10_prob(n.context, kEosId);
    return {lm, n.words};
  }

  std::vector<int> labels(int id) const {
    std::vector<int> out;
    for (; id > 0; id = nodes_[id].parent) out.push_back(nodes_[id].label);
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  void complete_word(PrefixNode &n) const {
    if (n.partial.empty()) return;
    if (lm_) {
      const WordId w = lm_->vocab().id(n.partial);
      n.lm_log10 += lm_->log10_prob(n.context, w);
      n.context.push_back(w);
      const auto keep = static_cast<std::size_t>(std::max(1, lm_->order() - 1));
      if (n.context.size() > keep)
        n.context.erase(n.context.begin(), n.context.end() - keep);
    }
    ++n.words;
    n.partial.clear();
  }

  const CtcPosteriors &post_;
  const NGramModel *lm_;
  std::vector<PrefixNode> nodes_;
  std::unordered_map<std::uint64_t, int> children_;
};

[[noreturn]] void fail_line(std::int64_t line_no, const std::string &what) {
  throw Error(Errc::kParseError,
              what + " on posterior line " + std::to_string(line_no), line_no);
}

}  // namespace

void CtcPosteriors::validate() const {
  if (frames < 1) throw Error(Errc::kInvalidArgument, "posteriors need T >= 1");
  if (symbols < 1 || alphabet.size() != symbols ||
      probs.size() != frames * symbols)
    throw Error(Errc::kInvalidArgument, "posterior matrix shape mismatch");
  if (blank < 0 || static_cast<std::size_t>(blank) >= symbols)
    throw Error(Errc::kInvalidArgument, "blank index out of range");
  if (separator == blank || separator < -1 ||
      separator >= static_cast<int>(symbols))
    throw Error(Errc::kInvalidArgument, "separator index invalid");
  for (std::size_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (double p : row(t)) {
      if (!(p >= 0.0)) throw Error(Errc::kInvalidArgument, "negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-5)
      throw Error(Errc::kInvalidArgument,
                  "posterior row " + std::to_string(t) + " sums to " +
                      std::to_string(sum));
  }
}

CtcPosteriors read_posteriors(std::istream &in) {
  CtcPosteriors post;
  std::string line;
  std::int64_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) fail_line(1, "missing header");
  {
    const auto f = tokenize_whitespace(line);
    long long vals[4];
    if (f.size() != 4) fail_line(line_no, "header needs 'T V blank sep'");
    for (int i = 0; i < 4; ++i) {
      auto [p, ec] = std::from_chars(f[i].data(), f[i].data() + f[i].size(), vals[i]);
      if (ec != std::errc() || p != f[i].data() + f[i].size())
        fail_line(line_no, "bad header field '" + f[i] + "'");
    }
    if (vals[0] < 1 || vals[1] < 1) fail_line(line_no, "T and V must be >= 1");
    post.frames = static_cast<std::size_t>(vals[0]);
    post.symbols = static_cast<std::size_t>(vals[1]);
    post.blank = static_cast<int>(vals[2]);
    post.separator = static_cast<int>(vals[3]);
  }
  if (!next_line()) fail_line(line_no + 1, "missing alphabet");
  post.alphabet = tokenize_whitespace(line);
  if (post.alphabet.size() != post.symbols)
    fail_line(line_no, "alphabet has " + std::to_string(post.alphabet.size()) +
                           " symbols, header says " + std::to_string(post.symbols));
  post.probs.reserve(post.frames * post.symbols);
  for (std::size_t t = 0; t < post.frames; ++t) {
    if (!next_line()) fail_line(line_no + 1, "missing posterior row");
    const auto f = tokenize_whitespace(line);
    if (f.size() != post.symbols) fail_line(line_no, "row has wrong width");
    double sum = 0.0;
    for (const auto &s : f) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size() || !(v >= 0.0))
        fail_line(line_no, "bad probability '" + s + "'");
      post.probs.push_back(v);
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-5)
      fail_line(line_no, "row does not sum to 1");
  }
  if (next_line()) fail_line(line_no, "trailing data after the last row");
  try {
    post.validate();
  } catch (const Error &e) {
    throw Error(Errc::kParseError, e.what(), 1);
  }
  return post;
}

void write_posteriors(std::ostream &out, const CtcPosteriors &post) {
  out << post.frames << ' ' << post.symbols << ' ' << post.blank << ' '
      << post.separator << '\n';
  for (std::size_t v = 0; v < post.symbols; ++v)
    out << (v ? " " : "") << post.alphabet[v];
  out << '\n';
  char buf[40];
  for (std::size_t t = 0; t < post.frames; ++t) {
    for (std::size_t v = 0; v < post.symbols; ++v) {
      std::snprintf(buf, sizeof buf, "%.17g", post.at(t, v));
      out << (v ? " " : "") << buf;
    }
    out << '\n';
  }
}

std::string labels_to_text(const CtcPosteriors &post,
                           std::span<const int> labels) {
  std::string text;
  bool pending_space = false;
  for (int l : labels) {
    if (l == post.separator) {
      pending_space = !text.empty();
      continue;
    }
    if (pending_space) text += ' ';
    pending_space = false;
    text += post.alphabet[l];
  }
  return text;
}

std::vector<int> greedy_labels(const CtcPosteriors &post) {
  std::vector<int> out;
  int prev = -1;
  for (std::size_t t = 0; t < post.frames; ++t) {
    const auto row = post.row(t);
    int best = 0;
    for (std::size_t v = 1; v < row.size(); ++v)
      if (row[v] > row[best]) best = static_cast<int>(v);
    if (best != post.blank && best != prev) out.push_back(best);
    prev = best;
  }
  return out;
}

std::string greedy_decode(const CtcPosteriors &post) {
  return labels_to_text(post, greedy_labels(post));
}

std::vector<Hypothesis> beam_decode(const CtcPosteriors &post,
                                    const FusionConfig &cfg,
                                    const NGramModel *lm) {
  if (cfg.beam_width < 1) throw Error(Errc::kConfigError, "beam width must be >= 1");
  if (cfg.alpha < 0) throw Error(Errc::kConfigError, "alpha must be >= 0");
  if (cfg.alpha > 0 && lm == nullptr)
    throw Error(Errc::kConfigError, "alpha > 0 needs a language model");
  post.validate();

  PrefixTrie trie(post, lm);
  const double ln10 = std::numbers::ln10;

  struct Beam {
    int node;
    PathScores s;
  };
  std::vector<Beam> beam{{0, PathScores{0.0, kNegInf, 0.0, kNegInf}}};
  std::vector<int> admitted;

  for (std::size_t t = 0; t < post.frames; ++t) {
    const auto row = post.row(t);
    admitted.clear();
    std::size_t best = 0;
    for (std::size_t v = 1; v < row.size(); ++v)
      if (row[v] > row[best]) best = v;
    for (std::size_t v = 0; v < row.size(); ++v) {
      if (row[v] <= 0.0) continue;
      if (v != best && cfg.prune_log10 && std::log10(row[v]) < *cfg.prune_log10)
        continue;
      admitted.push_back(static_cast<int>(v));
    }

    std::vector<Beam> next;
    std::unordered_map<int, std::size_t> slot;
    auto acc = [&](int node) -> PathScores & {
      auto [it, fresh] = slot.try_emplace(node, next.size());
      if (fresh) next.push_back({node, PathScores{}});
      return next[it->second].s;
    };

    for (const Beam &b : beam) {
      const double ptot = log_add(b.s.pb, b.s.pnb);
      const double vtot = std::max(b.s.vb, b.s.vnb);
      const int last = b.node == 0 ? -1 : trie.node(b.node).label;
      for (int v : admitted) {
        const double lp = std::log(row[v]);
        if (v == post.blank) {
          PathScores &s = acc(b.node);
          s.pb = log_add(s.pb, ptot + lp);
          s.vb = std::max(s.vb, vtot + lp);
        } else if (v == last) {
          PathScores &same = acc(b.node);
          same.pnb = log_add(same.pnb, b.s.pnb + lp);
          same.vnb = std::max(same.vnb, b.s.vnb + lp);
          const int c = trie.child(b.node, v);
          PathScores &ext = acc(c);
          ext.pnb = log_add(ext.pnb, b.s.pb + lp);
          ext.vnb = std::max(ext.vnb, b.s.vb + lp);
        } else {
          const int c = trie.child(b.node, v);
          PathScores &ext = acc(c);
          ext.pnb = log_add(ext.pnb, ptot + lp);
          ext.vnb = std::max(ext.vnb, vtot + lp);
        }
      }
    }

    std::erase_if(next, [](const Beam &b) {
      return b.s.pb == kNegInf && b.s.pnb == kNegInf;
    });
    if (next.size() > static_cast<std::size_t>(cfg.beam_width)) {
      auto rank = [&](const Beam &b) {
        const PrefixNode &n = trie.node(b.node);
        return std::max(b.s.vb, b.s.vnb) / ln10 + cfg.alpha * n.lm_log10 +
               cfg.beta * n.words;
      };
      std::vector<std::pair<double, std::size_t>> order(next.size());
      for (std::size_t i = 0; i < next.size(); ++i) order[i] = {rank(next[i]), i};
      std::partial_sort(order.begin(), order.begin() + cfg.beam_width, order.end(),
                        [&](const auto &a, const auto &b) {
                          if (a.first != b.first) return a.first > b.first;
                          return next[a.second].node < next[b.second].node;
                        });
      std::vector<Beam> kept;
      kept.reserve(cfg.beam_width);
      for (int i = 0; i < cfg.beam_width; ++i) kept.push_back(next[order[i].second]);
      next = std::move(kept);
    }
    beam = std::move(next);
  }

  std::vector<std::pair<Hypothesis, int>> out;
  out.reserve(beam.size());
  for (const Beam &b : beam) {
    Hypothesis h;
    h.labels = trie.labels(b.node);
    h.text = labels_to_text(post, h.labels);
    h.ctc_log10 = log_add(b.s.pb, b.s.pnb) / ln10;
    auto [lm_score, words] = trie.finish(b.node);
    h.lm_log10 = lm_score;
    h.word_count = words;
    h.total = h.ctc_log10 + cfg.alpha * h.lm_log10 + cfg.beta * h.word_count;
    out.emplace_back(std::move(h), b.node);
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    if (a.first.total != b.first.total) return a.first.total > b.first.total;
    return a.second < b.second;
  });
  std::vector<Hypothesis> result;
  result.reserve(out.size());
  for (auto &p : out) result.push_back(std::move(p.first));
  return result;
}

}  // namespace cforge
