// src/arpa.cc

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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "corpus_forge/error.h"
#include "corpus_forge/ngram_lm.h"

namespace cforge {

namespace {

std::string format_log10(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

double parse_log10(const std::string &s, std::int64_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(Errc::kParseError,
                "bad number '" + s + "' on ARPA line " + std::to_string(line_no),
                line_no);
  return v;
}

void strip_cr(std::string &line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void write_arpa(std::ostream &out, const NGramModel &model,
                const std::vector<std::string> &comments) {
  const Vocabulary &vocab = model.vocab();
  for (const auto &c : comments) out << c << '\n';
  if (!comments.empty()) out << '\n';
  out << "\\data\\\n";
  for (int n = 1; n <= model.order(); ++n)
    out << "ngram " << n << '=' << model.table(n).size() << '\n';

  for (int n = 1; n <= model.order(); ++n) {
    out << "\n\\" << n << "-grams:\n";
    struct Row {
      std::string words;
      const NGramEntry *entry;
    };
    std::vector<Row> rows;
    rows.reserve(model.table(n).size());
    for (const auto &[k, e] : model.table(n)) {
      std::string words;
      for (int i = 0; i < n; ++i) {
        if (i) words += ' ';
        words += vocab.word(k[i]);
      }
      rows.push_back({std::move(words), &e});
    }
    std::sort(rows.begin(), rows.end(),
              [](const Row &a, const Row &b) { return a.words < b.words; });
    for (const auto &r : rows) {
      out << format_log10(r.entry->log10_prob) << '\t' << r.words;
      if (n < model.order()) out << '\t' << format_log10(r.entry->log10_backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

NGramModel read_arpa(std::istream &in) {
  std::string line;
  std::int64_t line_no = 0;
  bool found = false;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line == "\\data\\") {
      found = true;
      break;
    }
  }
  if (!found) throw Error(Errc::kParseError, "no \\data\\ section", line_no);

  std::vector<std::uint64_t> declared;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      if (!declared.empty()) break;
      continue;
    }
    if (line.rfind("ngram ", 0) != 0)
      throw Error(Errc::kParseError,
                  "expected 'ngram N=count' on line " + std::to_string(line_no),
                  line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::kParseError, "malformed count line", line_no);
    const int n = static_cast<int>(parse_log10(line.substr(6, eq - 6), line_no));
    const auto count =
        static_cast<std::uint64_t>(parse_log10(line.substr(eq + 1), line_no));
    if (n != static_cast<int>(declared.size()) + 1)
      throw Error(Errc::kParseError, "n-gram orders must be listed 1, 2, ...",
                  line_no);
    declared.push_back(count);
  }
  if (declared.empty() || declared.size() > static_cast<std::size_t>(kMaxOrder))
    throw Error(Errc::kParseError, "ARPA order must be in 1..5", line_no);

  const int order = static_cast<int>(declared.size());
  NGramModel model(order);
  Vocabulary &vocab = model.mutable_vocab();

  int section = 0;
  std::vector<std::uint64_t> listed(order, 0);
  bool ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line[0] == '\\') {
      int n = 0;
      if (std::sscanf(line.c_str(), "\\%d-grams:", &n) != 1 || n != section + 1 ||
          n > order)
        throw Error(Errc::kParseError, "unexpected section " + line, line_no);
      section = n;
      continue;
    }
    if (section == 0)
      throw Error(Errc::kParseError, "entry outside an n-gram section",
                  line_no);
    const auto fields = tokenize_whitespace(line);
    if (fields.size() != static_cast<std::size_t>(section) + 1 &&
        fields.size() != static_cast<std::size_t>(section) + 2)
      throw Error(Errc::kParseError,
                  "wrong field count for a " + std::to_string(section) +
                      "-gram on line " + std::to_string(line_no),
                  line_no);
    NGramEntry entry;
    entry.log10_prob = parse_log10(fields[0], line_no);
    if (fields.size() == static_cast<std::size_t>(section) + 2)
      entry.log10_backoff = parse_log10(fields.back(), line_no);
    WordId words[kMaxOrder];
    for (int i = 0; i < section; ++i) {
      const std::string &w = fields[1 + i];
      if (section == 1) {
        words[i] = vocab.add(w);
      } else {
        if (!vocab.contains(w))
          throw Error(Errc::kArpaConsistencyError,
                      "word '" + w + "' on line " + std::to_string(line_no) +
                          " has no unigram",
                      line_no);
        words[i] = vocab.id(w);
      }
    }
    model.mutable_table(section)[make_key(std::span<const WordId>(words, section))] =
        entry;
    ++listed[section - 1];
  }
  if (!ended) throw Error(Errc::kParseError, "missing \\end\\", line_no);
  for (int n = 1; n <= order; ++n)
    if (listed[n - 1] != declared[n - 1] ||
        model.table(n).size() != declared[n - 1])
      throw Error(Errc::kArpaCountError,
                  "\\data\\ declares " + std::to_string(declared[n - 1]) + " " +
                      std::to_string(n) + "-grams, body lists " +
                      std::to_string(listed[n - 1]));

  for (int n = 2; n <= order; ++n) {
    for (const auto &[k, e] : model.table(n)) {
      WordId words[kMaxOrder];
      std::copy(k.begin(), k.begin() + n, words);
      if (!model.find(std::span<const WordId>(words, n - 1)) ||
          !model.find(std::span<const WordId>(words + 1, n - 1))) {
        std::string text;
        for (int i = 0; i < n; ++i) text += (i ? " " : "") + vocab.word(words[i]);
        throw Error(Errc::kArpaConsistencyError,
                    "n-gram '" + text + "' lacks its prefix or suffix");
      }
    }
  }

  // Vocabulary always seeds <unk>/<s>/</s>; give absent ones zero mass.
  for (WordId w : {kUnkId, kBosId, kEosId}) {
    const NGramKey k = make_key(std::span<const WordId>(&w, 1));
    if (!model.table(1).count(k)) model.mutable_table(1)[k].log10_prob = kLog10Zero;
  }
  return model;
}

}  // namespace cforge
