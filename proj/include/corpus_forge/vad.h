// include/corpus_forge/vad.h

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

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "corpus_forge/audio_io.h"

namespace cforge {

// Level k selects voice_threshold = 0.9 - 0.2 k; assign voice_threshold
// afterwards to override the preset.
struct VadConfig {
  double voice_threshold = 0.5;
  double silence_dbfs = -40.0;
  int level = 2;

  static VadConfig for_level(int level);
  void validate() const;
};

enum class FrameClass : std::uint8_t { kVoice, kSilence, kOther };

const char *frame_class_name(FrameClass c);

struct FrameLabel {
  std::int64_t index = 0;
  FrameClass label = FrameClass::kOther;
  double voice_prob = 0.0;
  double dbfs = kMinDb;

  bool operator==(const FrameLabel &) const = default;
};

// Voice wins; otherwise quiet frames are silence and everything else
// (music, noise) is Other.
FrameClass classify(double voice_prob, double frame_dbfs,
                    const VadConfig &config);

// Pluggable per-frame voice scorer. Backends that keep mutable state
// report thread_safe() == false and are cloned once per worker.
class VoiceDetector {
 public:
  virtual ~VoiceDetector() = default;

  virtual double voice_prob(std::span<const float> frame) const = 0;
  virtual bool thread_safe() const { return true; }
  virtual std::unique_ptr<VoiceDetector> clone() const = 0;

  // Scores every complete frame of `samples`. The default calls
  // voice_prob() per frame; detectors that look across frames override it.
  virtual std::vector<double> score_frames(std::span<const float> samples,
                                           std::size_t frame_len,
                                           bool parallel) const;
};

// Classical stand-in for a neural VAD. Each frame gets three sub-scores,
// every one passed through a smoothstep clamp to [0, 1]:
//   energy   - dBFS margin over a noise floor, full marks at +20 dB
//   zcr      - zero crossings inside [8, 80] per frame, ramps to 0 at 4/120
//   flatness - band spectral flatness <= 0.5 scores 1, >= 0.8 scores 0
// The result is their mean. Inside score_frames() the noise floor adapts:
// the 10th percentile of frame dBFS over +-50 frames, never below -60 dBFS.
// Isolated voice_prob() calls use the -60 dBFS absolute floor.
class BuiltinVoiceDetector : public VoiceDetector {
 public:
  struct Options {
    double abs_floor_dbfs = -60.0;
    int floor_window_frames = 50;
    double floor_percentile = 0.10;
    double energy_full_margin_db = 20.0;
    double zcr_low = 8, zcr_high = 80, zcr_low_zero = 4, zcr_high_zero = 120;
    double flatness_good = 0.5, flatness_bad = 0.8;
    int bands = 16;
  };

  struct SubScores {
    double energy = 0, zcr = 0, flatness = 0;
    double raw_dbfs = kMinDb, raw_crossings = 0, raw_flatness = 1;
    double mean() const { return (energy + zcr + flatness) / 3.0; }
  };

  BuiltinVoiceDetector() = default;
  explicit BuiltinVoiceDetector(Options opts) : opts_(opts) {}

  double voice_prob(std::span<const float> frame) const override;
  std::unique_ptr<VoiceDetector> clone() const override;
  std::vector<double> score_frames(std::span<const float> samples,
                                   std::size_t frame_len,
                                   bool parallel) const override;

  SubScores sub_scores(std::span<const float> frame,
                       double noise_floor_dbfs) const;

  const Options &options() const { return opts_; }

 private:
  Options opts_;
};

// Returns one label per complete frame; a trailing partial frame is
// dropped. Throws TooShort if the buffer holds less than one frame.
// classify_frames() splits frames across OpenMP threads;
// classify_frames_serial() is the reference it must match exactly.
std::vector<FrameLabel> classify_frames(const AudioBuffer &buffer,
                                        const FrameParams &params,
                                        const VadConfig &config,
                                        const VoiceDetector &backend);
std::vector<FrameLabel> classify_frames_serial(const AudioBuffer &buffer,
                                               const FrameParams &params,
                                               const VadConfig &config,
                                               const VoiceDetector &backend);

// Per-frame dBFS of every complete frame.
std::vector<double> frame_dbfs(std::span<const float> samples,
                               std::size_t frame_len);
std::vector<double> frame_dbfs_serial(std::span<const float> samples,
                                      std::size_t frame_len);

// Label file: `frame_index<TAB>voice_prob<TAB>dbfs` per line, indices
// ascending from 0. Labels are recomputed from the file's numbers under
// `config`. Throws ParseError(line) or FrameCountMismatch.
std::vector<FrameLabel> ingest_external_labels(std::istream &in,
                                               std::int64_t expected_frames,
                                               const VadConfig &config);
void write_labels(std::ostream &out, const std::vector<FrameLabel> &labels);

}  // namespace cforge
