// src/resample.cc

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

#include "corpus_forge/resample.h"

#include <cmath>
#include <numbers>
#include <numeric>

#include "corpus_forge/error.h"

namespace cforge {

namespace {

constexpr std::size_t kMaxTableEntries = std::size_t{1} << 22;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

Resampler::Resampler(int in_rate, int out_rate, ResamplerOptions opts)
    : in_rate_(in_rate), out_rate_(out_rate), kaiser_beta_(opts.kaiser_beta) {
  if (in_rate <= 0 || out_rate <= 0)
    throw Error(Errc::kInvalidArgument, "sample rates must be positive");
  if (opts.taps_per_phase < 2)
    throw Error(Errc::kInvalidArgument, "taps_per_phase must be >= 2");
  const long g = std::gcd(in_rate, out_rate);
  up_ = out_rate / g;
  down_ = in_rate / g;
  cutoff_ = std::min(1.0, static_cast<double>(up_) / down_);
  half_width_ = 0.5 * opts.taps_per_phase / cutoff_;
  reach_ = static_cast<long>(std::ceil(half_width_));

  const std::size_t width = 2 * reach_ + 1;
  if (static_cast<std::size_t>(up_) * width <= kMaxTableEntries) {
    table_.resize(up_ * width);
    for (long p = 0; p < up_; ++p) {
      const double frac = static_cast<double>(p) / up_;
      double sum = 0.0;
      for (long j = -reach_; j <= reach_; ++j) sum += kernel(frac - j);
      // Normalize each phase to unity DC gain.
      for (long j = -reach_; j <= reach_; ++j)
        table_[p * width + (j + reach_)] =
            static_cast<float>(kernel(frac - j) / sum);
    }
  }
}

double Resampler::kernel(double tau) const {
  const double x = tau / half_width_;
  if (x <= -1.0 || x >= 1.0) return 0.0;
  const double w = std::cyl_bessel_i(0.0, kaiser_beta_ * std::sqrt(1.0 - x * x)) /
                   std::cyl_bessel_i(0.0, kaiser_beta_);
  return cutoff_ * sinc(cutoff_ * tau) * w;
}

std::size_t Resampler::output_length(std::size_t in_len) const {
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(in_len) * up_ + down_ - 1) / down_);
}

float Resampler::sample_at(std::span<const float> in, std::size_t n) const {
  const auto pos = static_cast<unsigned __int128>(n) * down_;
  const long base = static_cast<long>(pos / up_);
  const long phase = static_cast<long>(pos % up_);
  const long len = static_cast<long>(in.size());
  const long lo = std::max(-reach_, -base);
  const long hi = std::min(reach_, len - 1 - base);
  double acc = 0.0;
  if (!table_.empty()) {
    const float *taps = &table_[phase * (2 * reach_ + 1) + reach_];
    for (long j = lo; j <= hi; ++j)
      acc += static_cast<double>(in[base + j]) * taps[j];
  } else {
    const double frac = static_cast<double>(phase) / up_;
    double norm = 0.0;
    for (long j = -reach_; j <= reach_; ++j) norm += kernel(frac - j);
    for (long j = lo; j <= hi; ++j)
      acc += static_cast<double>(in[base + j]) * kernel(frac - j);
    acc /= norm;
  }
  return static_cast<float>(std::clamp(acc, -1.0, 1.0));
}

std::vector<float> Resampler::process(std::span<const float> in) const {
  if (in_rate_ == out_rate_) return {in.begin(), in.end()};
  const auto n_out = static_cast<std::ptrdiff_t>(output_length(in.size()));
  std::vector<float> out(n_out);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t n = 0; n < n_out; ++n) out[n] = sample_at(in, n);
  return out;
}

std::vector<float> Resampler::process_serial(std::span<const float> in) const {
  if (in_rate_ == out_rate_) return {in.begin(), in.end()};
  const std::size_t n_out = output_length(in.size());
  std::vector<float> out(n_out);
  for (std::size_t n = 0; n < n_out; ++n) out[n] = sample_at(in, n);
  return out;
}

std::vector<float> resample(std::span<const float> in, int in_rate,
                            int out_rate) {
  if (in_rate == out_rate) return {in.begin(), in.end()};
  return Resampler(in_rate, out_rate).process(in);
}

}  // namespace cforge
