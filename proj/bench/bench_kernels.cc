// bench/bench_kernels.cc

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

// Parallel kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>

#include "corpus_forge/audio_io.h"
#include "corpus_forge/eval.h"
#include "corpus_forge/ngram_lm.h"
#include "corpus_forge/resample.h"
#include "corpus_forge/rng.h"
#include "corpus_forge/vad.h"

using namespace cforge;

namespace {

std::vector<float> noise_tone(std::size_t n) {
  CounterRng rng(1);
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = static_cast<float>(0.3 * std::sin(0.07 * i) + 0.2 * (rng.uniform01() - 0.5));
  return x;
}

const std::vector<float> &audio_48k() {
  static const auto x = noise_tone(48000 * 30);
  return x;
}

const AudioBuffer &audio_16k() {
  static const AudioBuffer b{noise_tone(16000 * 120), 16000, 1};
  return b;
}

const std::vector<std::vector<WordId>> &sentences() {
  static const auto s = [] {
    CounterRng rng(2);
    std::vector<std::vector<WordId>> out(20000);
    for (auto &v : out) {
      v.resize(4 + rng.uniform(16));
      for (auto &w : v) w = static_cast<WordId>(3 + rng.uniform(3000));
    }
    return out;
  }();
  return s;
}

const std::vector<EvalRecord> &records() {
  static const auto r = [] {
    CounterRng rng(3);
    std::vector<EvalRecord> out(5000);
    for (auto &e : out) {
      e.reference.resize(5 + rng.uniform(30));
      e.hypothesis.resize(5 + rng.uniform(30));
      for (auto &w : e.reference) w = std::to_string(rng.uniform(50));
      for (auto &w : e.hypothesis) w = std::to_string(rng.uniform(50));
    }
    return out;
  }();
  return r;
}

void BM_Resample(benchmark::State &st) {
  const Resampler r(48000, 16000);
  for (auto _ : st) benchmark::DoNotOptimize(r.process(audio_48k()));
}
void BM_ResampleSerial(benchmark::State &st) {
  const Resampler r(48000, 16000);
  for (auto _ : st) benchmark::DoNotOptimize(r.process_serial(audio_48k()));
}

void BM_ClassifyFrames(benchmark::State &st) {
  const BuiltinVoiceDetector det;
  const auto fp = FrameParams::make(16000, 20);
  for (auto _ : st)
    benchmark::DoNotOptimize(classify_frames(audio_16k(), fp, VadConfig::for_level(2), det));
}
void BM_ClassifyFramesSerial(benchmark::State &st) {
  const BuiltinVoiceDetector det;
  const auto fp = FrameParams::make(16000, 20);
  for (auto _ : st)
    benchmark::DoNotOptimize(classify_frames_serial(audio_16k(), fp, VadConfig::for_level(2), det));
}

void BM_CountNgrams(benchmark::State &st) {
  for (auto _ : st) benchmark::DoNotOptimize(count_ngrams(sentences(), 4));
}
void BM_CountNgramsSerial(benchmark::State &st) {
  for (auto _ : st) benchmark::DoNotOptimize(count_ngrams_serial(sentences(), 4));
}

void BM_Aggregate(benchmark::State &st) {
  for (auto _ : st) benchmark::DoNotOptimize(aggregate(records()));
}
void BM_AggregateSerial(benchmark::State &st) {
  for (auto _ : st) benchmark::DoNotOptimize(aggregate_serial(records()));
}

}  // namespace

BENCHMARK(BM_Resample)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ResampleSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ClassifyFrames)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ClassifyFramesSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CountNgrams)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CountNgramsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Aggregate)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AggregateSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
