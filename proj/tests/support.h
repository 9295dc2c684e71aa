// tests/support.h

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

// Fixture builders shared by the unit tests and the acceptance suite.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <stdlib.h>

#include "corpus_forge/audio_io.h"
#include "corpus_forge/error.h"
#include "corpus_forge/rng.h"

namespace cft {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "cforge-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const fs::path &path() const { return path_; }
  fs::path operator/(const std::string &rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const fs::path &p, const std::string &s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << s;
}

inline std::vector<float> sine(std::size_t n, double freq, int rate,
                               double amp = 1.0, double phase = 0.0) {
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = static_cast<float>(
        amp * std::sin(2 * std::numbers::pi * freq * i / rate + phase));
  return x;
}

// Uniform in [-amp, amp).
inline std::vector<float> white_noise(std::size_t n, double amp,
                                      std::uint64_t seed) {
  cforge::CounterRng rng(seed);
  std::vector<float> x(n);
  for (auto &v : x) v = static_cast<float>(amp * (2.0 * rng.uniform01() - 1.0));
  return x;
}

// A synthetic broadcast: whole-second segments of speech-like tone bursts,
// digital silence, or loud noise (music stand-in).
enum class Seg { kSpeech, kSilence, kNoise };

struct Segment {
  Seg kind;
  int seconds;
};

inline std::vector<float> render(const std::vector<Segment> &segs, int rate,
                                 std::uint64_t seed) {
  std::vector<float> out;
  cforge::CounterRng rng(seed);
  for (const auto &s : segs) {
    const std::size_t n = static_cast<std::size_t>(s.seconds) * rate;
    const std::size_t base = out.size();
    out.resize(base + n, 0.0f);
    if (s.kind == Seg::kSilence) continue;
    if (s.kind == Seg::kNoise) {
      auto nz = white_noise(n, 0.6, rng.next());
      std::copy(nz.begin(), nz.end(), out.begin() + base);
      continue;
    }
    // Voiced "syllables": a 180 Hz harmonic stack under a 4 Hz envelope
    // that never fully closes, so every 20 ms frame stays energetic.
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate;
      const double env = 0.55 + 0.45 * std::sin(2 * std::numbers::pi * 4.0 * t);
      double v = 0;
      for (int h = 1; h <= 4; ++h)
        v += std::sin(2 * std::numbers::pi * 180.0 * h * t) / h;
      out[base + i] = static_cast<float>(0.25 * env * v);
    }
  }
  return out;
}

// Ideal VAD output for a rendered fixture: the construction itself, with the
// measured frame dBFS.
inline std::string ideal_labels(const std::vector<Segment> &segs,
                                const std::vector<float> &samples, int rate,
                                int frame_ms = 20) {
  const std::size_t frame = static_cast<std::size_t>(rate) * frame_ms / 1000;
  std::ostringstream out;
  std::size_t idx = 0;
  char buf[96];
  for (const auto &s : segs) {
    const std::size_t frames = static_cast<std::size_t>(s.seconds) * 1000 / frame_ms;
    const double p = s.kind == Seg::kSpeech ? 0.97 : 0.03;
    for (std::size_t f = 0; f < frames; ++f, ++idx) {
      const double db = cforge::dbfs(
          std::span<const float>(samples.data() + idx * frame, frame));
      std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.3f\n", idx, p, db);
      out << buf;
    }
  }
  return out.str();
}

inline void write_wav(const fs::path &p, const std::vector<float> &x, int rate) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  cforge::AudioBuffer b;
  b.samples = x;
  b.sample_rate = rate;
  cforge::write_wav16_file(p, b);
}

template <typename F>
cforge::Errc error_code_of(F &&f) {
  try {
    f();
  } catch (const cforge::Error &e) {
    return e.code();
  }
  throw std::runtime_error("expected a cforge::Error");
}

}  // namespace cft
