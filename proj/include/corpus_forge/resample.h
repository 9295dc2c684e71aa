// include/corpus_forge/resample.h

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
#include <span>
#include <vector>

namespace cforge {

struct ResamplerOptions {
  // Zero crossings of the sinc kernel spanned at the lower of the two
  // rates, i.e. taps per output phase when upsampling.
  int taps_per_phase = 64;
  double kaiser_beta = 8.6;
};

// Rational-ratio windowed-sinc resampler (Kaiser window). Cutoff sits at
// the Nyquist frequency of the lower rate. Output length is
// ceil(n * out_rate / in_rate). Each output sample is an independent dot
// product, so process() splits samples across OpenMP threads while
// process_serial() keeps the single-threaded reference; both produce
// identical bits.
class Resampler {
 public:
  Resampler(int in_rate, int out_rate, ResamplerOptions opts = {});

  std::vector<float> process(std::span<const float> in) const;
  std::vector<float> process_serial(std::span<const float> in) const;

  std::size_t output_length(std::size_t in_len) const;
  int in_rate() const { return in_rate_; }
  int out_rate() const { return out_rate_; }

 private:
  float sample_at(std::span<const float> in, std::size_t n) const;
  double kernel(double tau) const;

  int in_rate_, out_rate_;
  long up_, down_;        // out/in reduced by gcd
  double cutoff_;         // relative to the input Nyquist, in (0, 1]
  double half_width_;     // kernel support radius in input samples
  double kaiser_beta_;
  long reach_;            // taps on each side of the base input index
  std::vector<float> table_;  // [phase][tap], empty when computed on the fly
};

std::vector<float> resample(std::span<const float> in, int in_rate,
                            int out_rate);

}  // namespace cforge
