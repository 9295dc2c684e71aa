// src/vad.cc

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

#include "corpus_forge/vad.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "corpus_forge/error.h"

namespace cforge {

namespace {

double smoothstep(double x) {
  const double s = std::clamp(x, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

// Hann-windowed DFT power, grouped into equal-width bands over bins
// 1..N/2 (DC excluded).
class BandSpectrum {
 public:
  explicit BandSpectrum(std::size_t n) : n_(n), cos_(n), sin_(n), window_(n) {
    for (std::size_t m = 0; m < n; ++m) {
      const double a = 2.0 * std::numbers::pi * m / n;
      cos_[m] = std::cos(a);
      sin_[m] = std::sin(a);
      window_[m] = 0.5 - 0.5 * std::cos(a);
    }
  }

  double flatness(std::span<const float> frame, int bands) const {
    const std::size_t half = n_ / 2;
    if (half == 0) return 1.0;
    const auto nb = static_cast<std::size_t>(
        std::clamp<std::size_t>(bands, 1, half));
    std::vector<double> band(nb, 0.0);
    std::vector<double> windowed(n_);
    for (std::size_t m = 0; m < n_; ++m) windowed[m] = frame[m] * window_[m];
    for (std::size_t k = 1; k <= half; ++k) {
      double re = 0.0, im = 0.0;
      std::size_t idx = 0;
      for (std::size_t m = 0; m < n_; ++m) {
        re += windowed[m] * cos_[idx];
        im -= windowed[m] * sin_[idx];
        idx += k;
        if (idx >= n_) idx -= n_;
      }
      band[(k - 1) * nb / half] += re * re + im * im;
    }
    constexpr double kEps = 1e-20;
    double log_sum = 0.0, sum = 0.0;
    for (double p : band) {
      log_sum += std::log(p + kEps);
      sum += p + kEps;
    }
    const double geo = std::exp(log_sum / nb);
    return std::clamp(geo / (sum / nb), 0.0, 1.0);
  }

  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> cos_, sin_, window_;
};

BuiltinVoiceDetector::SubScores score_with(
    const BuiltinVoiceDetector::Options &o, const BandSpectrum &spectrum,
    std::span<const float> frame, double floor_dbfs) {
  BuiltinVoiceDetector::SubScores s;
  s.raw_dbfs = dbfs(frame);
  if (s.raw_dbfs == kMinDb) return s;

  s.energy = smoothstep((s.raw_dbfs - floor_dbfs) / o.energy_full_margin_db);

  std::size_t crossings = 0;
  for (std::size_t i = 1; i < frame.size(); ++i)
    crossings += (frame[i - 1] >= 0.0f) != (frame[i] >= 0.0f);
  const double c = static_cast<double>(crossings);
  s.raw_crossings = c;
  if (c < o.zcr_low)
    s.zcr = smoothstep((c - o.zcr_low_zero) / (o.zcr_low - o.zcr_low_zero));
  else if (c > o.zcr_high)
    s.zcr = smoothstep((o.zcr_high_zero - c) / (o.zcr_high_zero - o.zcr_high));
  else
    s.zcr = 1.0;

  s.raw_flatness = spectrum.flatness(frame, o.bands);
  s.flatness = smoothstep((o.flatness_bad - s.raw_flatness) /
                          (o.flatness_bad - o.flatness_good));
  return s;
}

double parse_double(std::string_view field, std::int64_t line_no) {
  double v = 0.0;
  const auto *end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw Error(Errc::kParseError,
                "bad number '" + std::string(field) + "' on line " +
                    std::to_string(line_no),
                line_no);
  return v;
}

}  // namespace

VadConfig VadConfig::for_level(int level) {
  if (level < 0 || level > 4)
    throw Error(Errc::kInvalidArgument, "VAD level must be in 0..4");
  VadConfig c;
  c.level = level;
  c.voice_threshold = 0.9 - 0.2 * level;
  return c;
}

void VadConfig::validate() const {
  if (!(voice_threshold >= 0.0 && voice_threshold <= 1.0))
    throw Error(Errc::kInvalidArgument, "voice_threshold must be in [0,1]");
  if (level < 0 || level > 4)
    throw Error(Errc::kInvalidArgument, "VAD level must be in 0..4");
}

const char *frame_class_name(FrameClass c) {
  switch (c) {
    case FrameClass::kVoice: return "voice";
    case FrameClass::kSilence: return "silence";
    case FrameClass::kOther: return "other";
  }
  return "?";
}

FrameClass classify(double voice_prob, double frame_dbfs,
                    const VadConfig &config) {
  if (voice_prob >= config.voice_threshold) return FrameClass::kVoice;
  if (frame_dbfs < config.silence_dbfs) return FrameClass::kSilence;
  return FrameClass::kOther;
}

std::vector<double> VoiceDetector::score_frames(std::span<const float> samples,
                                                std::size_t frame_len,
                                                bool parallel) const {
  const auto n = static_cast<std::ptrdiff_t>(samples.size() / frame_len);
  std::vector<double> out(n);
  if (!parallel) {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[i] = voice_prob(samples.subspan(i * frame_len, frame_len));
    return out;
  }
  const bool shared = thread_safe();
#pragma omp parallel
  {
    std::unique_ptr<VoiceDetector> local;
    if (!shared) local = clone();
    const VoiceDetector &det = shared ? *this : *local;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[i] = det.voice_prob(samples.subspan(i * frame_len, frame_len));
  }
  return out;
}

double BuiltinVoiceDetector::voice_prob(std::span<const float> frame) const {
  if (frame.empty()) return 0.0;
  BandSpectrum spectrum(frame.size());
  return score_with(opts_, spectrum, frame, opts_.abs_floor_dbfs).mean();
}

BuiltinVoiceDetector::SubScores BuiltinVoiceDetector::sub_scores(
    std::span<const float> frame, double noise_floor_dbfs) const {
  if (frame.empty()) throw Error(Errc::kEmptyFrame, "empty frame");
  BandSpectrum spectrum(frame.size());
  return score_with(opts_, spectrum, frame, noise_floor_dbfs);
}

std::unique_ptr<VoiceDetector> BuiltinVoiceDetector::clone() const {
  return std::make_unique<BuiltinVoiceDetector>(opts_);
}

std::vector<double> BuiltinVoiceDetector::score_frames(
    std::span<const float> samples, std::size_t frame_len,
    bool parallel) const {
  const std::vector<double> levels = parallel
                                         ? frame_dbfs(samples, frame_len)
                                         : frame_dbfs_serial(samples, frame_len);
  const auto n = static_cast<std::ptrdiff_t>(levels.size());
  const BandSpectrum spectrum(frame_len);
  std::vector<double> out(n);
  const std::ptrdiff_t w = opts_.floor_window_frames;

  auto score_one = [&](std::ptrdiff_t i, std::vector<double> &scratch) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - w);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + w);
    scratch.assign(levels.begin() + lo, levels.begin() + hi + 1);
    const auto k = static_cast<std::size_t>(opts_.floor_percentile *
                                            (scratch.size() - 1));
    std::nth_element(scratch.begin(), scratch.begin() + k, scratch.end());
    const double floor = std::max(opts_.abs_floor_dbfs, scratch[k]);
    out[i] =
        score_with(opts_, spectrum, samples.subspan(i * frame_len, frame_len),
                   floor)
            .mean();
  };

  if (parallel) {
#pragma omp parallel
    {
      std::vector<double> scratch;
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) score_one(i, scratch);
    }
  } else {
    std::vector<double> scratch;
    for (std::ptrdiff_t i = 0; i < n; ++i) score_one(i, scratch);
  }
  return out;
}

std::vector<double> frame_dbfs(std::span<const float> samples,
                               std::size_t frame_len) {
  const auto n = static_cast<std::ptrdiff_t>(samples.size() / frame_len);
  std::vector<double> out(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = dbfs(samples.subspan(i * frame_len, frame_len));
  return out;
}

std::vector<double> frame_dbfs_serial(std::span<const float> samples,
                                      std::size_t frame_len) {
  const std::size_t n = samples.size() / frame_len;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = dbfs(samples.subspan(i * frame_len, frame_len));
  return out;
}

namespace {

std::vector<FrameLabel> classify_impl(const AudioBuffer &buffer,
                                      const FrameParams &params,
                                      const VadConfig &config,
                                      const VoiceDetector &backend,
                                      bool parallel) {
  config.validate();
  const std::size_t len = params.samples_per_frame;
  if (len == 0) throw Error(Errc::kInvalidArgument, "zero-length frames");
  if (buffer.samples.size() < len)
    throw Error(Errc::kTooShort, "buffer shorter than one frame");
  const std::span<const float> samples(buffer.samples);
  const std::vector<double> levels =
      parallel ? frame_dbfs(samples, len) : frame_dbfs_serial(samples, len);
  const std::vector<double> probs = backend.score_frames(samples, len, parallel);
  if (probs.size() != levels.size())
    throw Error(Errc::kFrameCountMismatch, "backend returned wrong frame count");

  std::vector<FrameLabel> labels(levels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probs[i], 0.0, 1.0);
    labels[i] = FrameLabel{static_cast<std::int64_t>(i),
                           classify(p, levels[i], config), p, levels[i]};
  }
  return labels;
}

}  // namespace

std::vector<FrameLabel> classify_frames(const AudioBuffer &buffer,
                                        const FrameParams &params,
                                        const VadConfig &config,
                                        const VoiceDetector &backend) {
  return classify_impl(buffer, params, config, backend, true);
}

std::vector<FrameLabel> classify_frames_serial(const AudioBuffer &buffer,
                                               const FrameParams &params,
                                               const VadConfig &config,
                                               const VoiceDetector &backend) {
  return classify_impl(buffer, params, config, backend, false);
}

std::vector<FrameLabel> ingest_external_labels(std::istream &in,
                                               std::int64_t expected_frames,
                                               const VadConfig &config) {
  config.validate();
  std::vector<FrameLabel> labels;
  std::string line;
  std::int64_t line_no = 0;
  bool saw_blank = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      saw_blank = true;
      continue;
    }
    if (saw_blank)
      throw Error(Errc::kParseError,
                  "blank line inside label file before line " +
                      std::to_string(line_no),
                  line_no);
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw Error(Errc::kParseError,
                  "expected 3 tab-separated fields on line " +
                      std::to_string(line_no),
                  line_no);
    const std::string_view view(line);
    std::int64_t index = -1;
    {
      const auto f = view.substr(0, t1);
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), index);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw Error(Errc::kParseError,
                    "bad frame index on line " + std::to_string(line_no),
                    line_no);
    }
    if (index != static_cast<std::int64_t>(labels.size()))
      throw Error(Errc::kParseError,
                  "frame index " + std::to_string(index) + " on line " +
                      std::to_string(line_no) + " breaks the 0,1,2,... order",
                  line_no);
    const double prob = parse_double(view.substr(t1 + 1, t2 - t1 - 1), line_no);
    const double level = parse_double(view.substr(t2 + 1), line_no);
    if (prob < 0.0 || prob > 1.0)
      throw Error(Errc::kParseError,
                  "voice_prob outside [0,1] on line " + std::to_string(line_no),
                  line_no);
    labels.push_back(
        FrameLabel{index, classify(prob, level, config), prob, level});
  }
  if (static_cast<std::int64_t>(labels.size()) != expected_frames)
    throw Error(Errc::kFrameCountMismatch,
                "label file has " + std::to_string(labels.size()) +
                    " frames, audio has " + std::to_string(expected_frames));
  return labels;
}

void write_labels(std::ostream &out, const std::vector<FrameLabel> &labels) {
  char buf[96];
  for (const FrameLabel &l : labels) {
    const int n = std::snprintf(buf, sizeof buf, "%lld\t%.6f\t%.3f\n",
                                static_cast<long long>(l.index), l.voice_prob,
                                l.dbfs);
    out.write(buf, n);
  }
}

}  // namespace cforge
