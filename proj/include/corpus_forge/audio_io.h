// include/corpus_forge/audio_io.h

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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cforge {

inline constexpr int kCanonicalRate = 16000;

// Returned by dbfs() for an all-zero frame instead of -infinity.
inline constexpr double kMinDb = -1000.0;

// Mono PCM in [-1, 1]. Duration is always derived from the sample count.
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = kCanonicalRate;
  int channel_count = 1;

  std::int64_t duration_ms() const;
};

// Analysis frame geometry. samples_per_frame must come out integral for the
// buffer's rate; make() enforces that.
struct FrameParams {
  int frame_ms = 20;
  std::size_t samples_per_frame = 320;

  static FrameParams make(int sample_rate, int frame_ms = 20);
};

enum class WavEncoding { kPcm8, kPcm16, kPcm24, kPcm32, kFloat32 };

// Decodes a RIFF/WAVE byte image, downmixes by channel mean, then resamples
// to `target_rate`. Throws FormatError, UnsupportedCodec or EmptyAudio.
AudioBuffer load_audio(std::span<const std::uint8_t> bytes, int target_rate);
AudioBuffer load_audio(std::istream &in, int target_rate);
AudioBuffer load_audio_file(const std::filesystem::path &path,
                            int target_rate);

// Decoded frames before downmix, interleaved.
struct WavData {
  std::vector<float> interleaved;
  int sample_rate = 0;
  int channels = 0;
};
WavData decode_wav(std::span<const std::uint8_t> bytes);

std::vector<float> downmix(const std::vector<float> &interleaved,
                           int channels);

// Serializes interleaved samples. 16-bit output uses round(x * 32768)
// clamped to [-32768, 32767].
std::vector<std::uint8_t> encode_wav(std::span<const float> interleaved,
                                     int channels, int sample_rate,
                                     WavEncoding encoding);

void write_wav16(std::ostream &out, const AudioBuffer &buffer);
void write_wav16_file(const std::filesystem::path &path,
                      const AudioBuffer &buffer);

// 20*log10(rms) relative to full scale 1.0; kMinDb for digital silence.
// Throws EmptyFrame on an empty slice.
double dbfs(std::span<const float> frame);
double dbfs(std::span<const double> frame);

}  // namespace cforge
