// tests/oracles.h

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

// Reference implementations used only to check the library. They are
// deliberately naive: brute force, direct recursion, textbook formulas.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

// ---- CTC: sum over every one of V^T alignments.

// probs is row-major T x V.
inline std::map<std::vector<int>, double> ctc_marginals(
    const std::vector<double> &probs, int T, int V, int blank) {
  std::map<std::vector<int>, double> out;
  std::vector<int> path(T, 0);
  for (;;) {
    double p = 1.0;
    for (int t = 0; t < T; ++t) p *= probs[t * V + path[t]];
    std::vector<int> labels;
    int prev = -1;
    for (int t = 0; t < T; ++t) {
      if (path[t] != prev && path[t] != blank) labels.push_back(path[t]);
      prev = path[t];
    }
    out[labels] += p;
    int t = T - 1;
    while (t >= 0 && ++path[t] == V) path[t--] = 0;
    if (t < 0) break;
  }
  return out;
}

// ---- Edit distance by memoized recursion.

inline int edit_distance(const std::vector<std::string> &a,
                         const std::vector<std::string> &b) {
  std::map<std::pair<std::size_t, std::size_t>, int> memo;
  std::function<int(std::size_t, std::size_t)> d = [&](std::size_t i,
                                                       std::size_t j) -> int {
    if (i == a.size()) return static_cast<int>(b.size() - j);
    if (j == b.size()) return static_cast<int>(a.size() - i);
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int best = d(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, d(i + 1, j) + 1);
    best = std::min(best, d(i, j + 1) + 1);
    return memo[key] = best;
  };
  return d(0, 0);
}

struct Counts {
  int s = 0, i = 0, d = 0;
};

// Enumerates every alignment and keeps the cheapest, breaking ties toward
// more substitutions. Exponential: short inputs only.
inline Counts best_alignment(const std::vector<std::string> &ref,
                             const std::vector<std::string> &hyp) {
  Counts best{1 << 20, 0, 0};
  auto cost = [](const Counts &c) { return c.s + c.i + c.d; };
  std::function<void(std::size_t, std::size_t, Counts)> walk =
      [&](std::size_t i, std::size_t j, Counts c) {
        if (i == ref.size() && j == hyp.size()) {
          if (cost(c) < cost(best) || (cost(c) == cost(best) && c.s > best.s))
            best = c;
          return;
        }
        if (i < ref.size() && j < hyp.size()) {
          Counts n = c;
          if (ref[i] != hyp[j]) ++n.s;
          walk(i + 1, j + 1, n);
        }
        if (i < ref.size()) walk(i + 1, j, Counts{c.s, c.i, c.d + 1});
        if (j < hyp.size()) walk(i, j + 1, Counts{c.s, c.i + 1, c.d});
      };
  walk(0, 0, {});
  return best;
}

// ---- Interpolated modified Kneser-Ney, straight from the definitions.
//
// Conventions shared with the library: sentences are padded with one <s>
// and one </s>; adjusted counts are raw counts at the highest order and for
// n-grams beginning with <s>, otherwise the number of distinct words seen to
// the left; <s> is never predicted; unigrams interpolate with a uniform
// distribution over the vocabulary (including <unk> and </s>, excluding
// <s>); D_k = k - (k+1) Y t_{k+1}/t_k with Y = t1/(t1+2 t2), falling back
// to 0.75 for all three when t1, t2 or t3 is zero or a value leaves (0, k].
class KneserNey {
 public:
  using Gram = std::vector<std::string>;

  KneserNey(const std::vector<std::vector<std::string>> &sentences, int order)
      : order_(order) {
    vocab_ = {"<unk>", "</s>"};
    std::map<Gram, long> raw;
    for (const auto &s : sentences) {
      Gram p{"<s>"};
      for (const auto &w : s) {
        p.push_back(w);
        vocab_.insert(w);
      }
      p.push_back("</s>");
      for (std::size_t i = 0; i < p.size(); ++i)
        for (int n = 1; n <= order && i + n <= p.size(); ++n)
          raw[Gram(p.begin() + i, p.begin() + i + n)] += 1;
    }
    for (const auto &[g, c] : raw) {
      if (g == Gram{"<s>"}) continue;
      const int n = static_cast<int>(g.size());
      if (n == order || g[0] == "<s>") {
        adj_[g] = c;
      } else {
        std::set<std::string> left;
        for (const auto &[h, hc] : raw)
          if (static_cast<int>(h.size()) == n + 1 &&
              std::equal(g.begin(), g.end(), h.begin() + 1))
            left.insert(h[0]);
        adj_[g] = static_cast<long>(left.size());
      }
    }
    for (int n = 1; n <= order; ++n) {
      long t[5] = {0, 0, 0, 0, 0};
      for (const auto &[g, a] : adj_)
        if (static_cast<int>(g.size()) == n && a <= 4) ++t[a];
      std::array<double, 4> d{0, 0.75, 0.75, 0.75};
      if (t[1] > 0 && t[2] > 0 && t[3] > 0) {
        const double y = double(t[1]) / (t[1] + 2.0 * t[2]);
        std::array<double, 4> e{0, 1 - 2 * y * t[2] / t[1],
                                2 - 3 * y * t[3] / t[2],
                                3 - 4 * y * t[4] / t[3]};
        if (e[1] > 0 && e[1] <= 1 && e[2] > 0 && e[2] <= 2 && e[3] > 0 &&
            e[3] <= 3)
          d = e;
      }
      discounts_.push_back(d);
    }
  }

  // P(w | context) with the context truncated to order-1 words.
  double prob(Gram ctx, const std::string &word) const {
    const std::string w = vocab_.count(word) ? word : "<unk>";
    if (static_cast<int>(ctx.size()) > order_ - 1)
      ctx.erase(ctx.begin(), ctx.end() - (order_ - 1));
    return interp(ctx, w);
  }

  const std::set<std::string> &vocab() const { return vocab_; }

 private:
  double D(int n, long a) const {
    const auto &d = discounts_[n - 1];
    return a == 0 ? 0.0 : d[std::min<long>(a, 3)];
  }

  double interp(const Gram &ctx, const std::string &w) const {
    if (w == "<s>") return 0.0;
    const int n = static_cast<int>(ctx.size()) + 1;
    double total = 0, gamma_num = 0, own = 0;
    for (const auto &[g, a] : adj_) {
      if (static_cast<int>(g.size()) != n ||
          !std::equal(ctx.begin(), ctx.end(), g.begin()))
        continue;
      total += a;
      gamma_num += D(n, a);
      if (g.back() == w) own = a - D(n, a);
    }
    const double lower =
        ctx.empty() ? 1.0 / static_cast<double>(vocab_.size())
                    : interp(Gram(ctx.begin() + 1, ctx.end()), w);
    if (total == 0) return lower;
    return own / total + gamma_num / total * lower;
  }

  int order_;
  std::set<std::string> vocab_;  // excludes <s>
  std::map<Gram, long> adj_;
  std::vector<std::array<double, 4>> discounts_;
};

}  // namespace oracle
