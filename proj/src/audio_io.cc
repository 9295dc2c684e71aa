// src/audio_io.cc

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

#include "corpus_forge/audio_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "corpus_forge/error.h"
#include "corpus_forge/resample.h"

namespace cforge {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const std::uint8_t *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t le32(const std::uint8_t *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}
void put32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}
void put_tag(std::vector<std::uint8_t> &out, const char *tag) {
  out.insert(out.end(), tag, tag + 4);
}

float clip(double x) {
  if (std::isnan(x)) return 0.0f;
  return static_cast<float>(std::clamp(x, -1.0, 1.0));
}

template <typename T>
double dbfs_impl(std::span<const T> frame) {
  if (frame.empty()) throw Error(Errc::kEmptyFrame, "dbfs of empty frame");
  double sum = 0.0;
  for (T x : frame) sum += static_cast<double>(x) * static_cast<double>(x);
  if (sum == 0.0) return kMinDb;
  const double rms = std::sqrt(sum / static_cast<double>(frame.size()));
  return std::max(kMinDb, 20.0 * std::log10(rms));
}

}  // namespace

std::int64_t AudioBuffer::duration_ms() const {
  if (sample_rate <= 0) return 0;
  return std::llround(1000.0 * static_cast<double>(samples.size()) /
                      sample_rate);
}

FrameParams FrameParams::make(int sample_rate, int frame_ms) {
  if (frame_ms <= 0 || sample_rate <= 0)
    throw Error(Errc::kInvalidArgument, "frame_ms and sample_rate must be > 0");
  const std::int64_t num = static_cast<std::int64_t>(sample_rate) * frame_ms;
  if (num % 1000 != 0)
    throw Error(Errc::kInvalidArgument,
                "frame of " + std::to_string(frame_ms) + "ms at " +
                    std::to_string(sample_rate) +
                    "Hz is not a whole number of samples");
  return FrameParams{frame_ms, static_cast<std::size_t>(num / 1000)};
}

WavData decode_wav(std::span<const std::uint8_t> bytes) {
  const std::uint8_t *p = bytes.data();
  const std::size_t size = bytes.size();
  if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0)
    throw Error(Errc::kFormatError, "missing RIFF/WAVE signature");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const std::uint8_t *data = nullptr;
  std::size_t data_len = 0;

  std::size_t off = 12;
  while (off + 8 <= size) {
    const std::uint8_t *chunk = p + off;
    const std::size_t chunk_len = le32(chunk + 4);
    const std::size_t body = off + 8;
    const std::size_t avail = size - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_len < 16 || avail < 16)
        throw Error(Errc::kFormatError, "truncated fmt chunk");
      format = le16(p + body);
      channels = le16(p + body + 2);
      rate = le32(p + body + 4);
      block_align = le16(p + body + 12);
      bits = le16(p + body + 14);
      if (format == kFormatExtensible) {
        if (chunk_len < 40 || avail < 40)
          throw Error(Errc::kFormatError, "truncated WAVE_FORMAT_EXTENSIBLE");
        format = le16(p + body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = p + body;
      // Streaming writers leave 0xFFFFFFFF or an over-long size; trust the
      // bytes actually present.
      data_len = std::min(chunk_len, avail);
      break;
    }
    off = body + chunk_len + (chunk_len & 1);
  }
  if (!have_fmt) throw Error(Errc::kFormatError, "no fmt chunk");
  if (data == nullptr) throw Error(Errc::kFormatError, "no data chunk");
  if (channels == 0 || rate == 0 || bits == 0)
    throw Error(Errc::kFormatError, "zero channels, rate or bit depth");
  if (format != kFormatPcm && format != kFormatFloat)
    throw Error(Errc::kUnsupportedCodec,
                "WAVE format tag " + std::to_string(format) + " is not PCM");
  if (format == kFormatFloat && bits != 32)
    throw Error(Errc::kUnsupportedCodec, "only 32-bit float WAVE is supported");
  if (format == kFormatPcm && bits != 8 && bits != 16 && bits != 24 &&
      bits != 32)
    throw Error(Errc::kUnsupportedCodec,
                std::to_string(bits) + "-bit PCM is not supported");
  const std::size_t bytes_per_sample = bits / 8;
  if (block_align != bytes_per_sample * channels)
    throw Error(Errc::kFormatError, "block align disagrees with format");

  const std::size_t n = data_len / bytes_per_sample / channels * channels;
  if (n == 0) throw Error(Errc::kEmptyAudio, "WAVE data chunk has no frames");

  WavData out;
  out.sample_rate = static_cast<int>(rate);
  out.channels = channels;
  out.interleaved.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t *s = data + i * bytes_per_sample;
    double v = 0.0;
    if (format == kFormatFloat) {
      float f;
      std::memcpy(&f, s, 4);
      v = f;
    } else if (bits == 8) {
      v = (static_cast<int>(s[0]) - 128) / 128.0;
    } else if (bits == 16) {
      v = static_cast<std::int16_t>(le16(s)) / 32768.0;
    } else if (bits == 24) {
      std::int32_t x = s[0] | (s[1] << 8) | (s[2] << 16);
      if (x & 0x800000) x -= 0x1000000;
      v = x / 8388608.0;
    } else {
      v = static_cast<std::int32_t>(le32(s)) / 2147483648.0;
    }
    out.interleaved[i] = clip(v);
  }
  return out;
}

std::vector<float> downmix(const std::vector<float> &interleaved,
                           int channels) {
  if (channels == 1) return interleaved;
  const std::size_t frames = interleaved.size() / channels;
  std::vector<float> mono(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double sum = 0.0;
    for (int c = 0; c < channels; ++c) sum += interleaved[f * channels + c];
    mono[f] = static_cast<float>(sum / channels);
  }
  return mono;
}

AudioBuffer load_audio(std::span<const std::uint8_t> bytes, int target_rate) {
  if (target_rate <= 0)
    throw Error(Errc::kInvalidArgument, "target rate must be positive");
  WavData wav = decode_wav(bytes);
  AudioBuffer buf;
  buf.sample_rate = target_rate;
  buf.channel_count = 1;
  buf.samples = resample(downmix(wav.interleaved, wav.channels),
                         wav.sample_rate, target_rate);
  return buf;
}

AudioBuffer load_audio(std::istream &in, int target_rate) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_audio(bytes, target_rate);
}

AudioBuffer load_audio_file(const std::filesystem::path &path,
                            int target_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  return load_audio(in, target_rate);
}

std::vector<std::uint8_t> encode_wav(std::span<const float> interleaved,
                                     int channels, int sample_rate,
                                     WavEncoding encoding) {
  if (channels <= 0 || sample_rate <= 0)
    throw Error(Errc::kInvalidArgument, "bad channel count or rate");
  int bits = 16;
  std::uint16_t tag = kFormatPcm;
  switch (encoding) {
    case WavEncoding::kPcm8: bits = 8; break;
    case WavEncoding::kPcm16: bits = 16; break;
    case WavEncoding::kPcm24: bits = 24; break;
    case WavEncoding::kPcm32: bits = 32; break;
    case WavEncoding::kFloat32: bits = 32; tag = kFormatFloat; break;
  }
  const std::uint32_t bps = bits / 8;
  const auto data_len = static_cast<std::uint32_t>(interleaved.size() * bps);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_len);
  put_tag(out, "RIFF");
  put32(out, 36 + data_len);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 16);
  put16(out, tag);
  put16(out, static_cast<std::uint16_t>(channels));
  put32(out, static_cast<std::uint32_t>(sample_rate));
  put32(out, static_cast<std::uint32_t>(sample_rate) * channels * bps);
  put16(out, static_cast<std::uint16_t>(channels * bps));
  put16(out, static_cast<std::uint16_t>(bits));
  put_tag(out, "data");
  put32(out, data_len);

  for (float f : interleaved) {
    const double x = std::clamp(static_cast<double>(f), -1.0, 1.0);
    switch (encoding) {
      case WavEncoding::kPcm8:
        out.push_back(static_cast<std::uint8_t>(
            std::clamp<long>(std::lround(x * 128.0) + 128, 0, 255)));
        break;
      case WavEncoding::kPcm16:
        put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(
                       std::clamp<long>(std::lround(x * 32768.0), -32768,
                                        32767))));
        break;
      case WavEncoding::kPcm24: {
        const auto v = static_cast<std::int32_t>(
            std::clamp<long>(std::lround(x * 8388608.0), -8388608, 8388607));
        out.push_back(v & 0xFF);
        out.push_back((v >> 8) & 0xFF);
        out.push_back((v >> 16) & 0xFF);
        break;
      }
      case WavEncoding::kPcm32:
        put32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(
                       std::clamp<long long>(std::llround(x * 2147483648.0),
                                             -2147483648LL, 2147483647LL))));
        break;
      case WavEncoding::kFloat32: {
        const float v = static_cast<float>(x);
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        put32(out, u);
        break;
      }
    }
  }
  return out;
}

void write_wav16(std::ostream &out, const AudioBuffer &buffer) {
  const auto bytes = encode_wav(buffer.samples, 1, buffer.sample_rate,
                                WavEncoding::kPcm16);
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void write_wav16_file(const std::filesystem::path &path,
                      const AudioBuffer &buffer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  write_wav16(out, buffer);
  if (!out) throw Error(Errc::kIo, "write failed for " + path.string());
}

double dbfs(std::span<const float> frame) { return dbfs_impl(frame); }
double dbfs(std::span<const double> frame) { return dbfs_impl(frame); }

}  // namespace cforge
