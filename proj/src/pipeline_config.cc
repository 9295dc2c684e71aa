// src/pipeline_config.cc

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

#include "corpus_forge/pipeline_config.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "corpus_forge/error.h"

namespace cforge {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <typename T>
T scalar(const YAML::Node &node, const std::string &key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception &) {
    throw Error(Errc::kConfigError, "bad value for config key '" + key + "'",
                node.Mark().line + 1);
  }
}

}  // namespace

VadConfig PipelineConfig::vad() const {
  VadConfig v = VadConfig::for_level(vad_level);
  v.silence_dbfs = silence_dbfs;
  if (voice_threshold) v.voice_threshold = *voice_threshold;
  return v;
}

void PipelineConfig::validate() const {
  auto bad = [](const std::string &m) { throw Error(Errc::kConfigError, m); };
  if (version != kConfigVersion) bad("unsupported config version: " + version);
  if (rate <= 0) bad("rate must be positive");
  if (frame_ms <= 0) bad("frame_ms must be positive");
  if (frames_per_chunk < 1) bad("frames_per_chunk must be >= 1");
  if (min_span_ms < 0 || min_span_ms % chunk_ms() != 0)
    bad("min_span_ms must be a non-negative multiple of the chunk length");
  if (span_ms <= 0) bad("span_ms must be positive");
  if (lm_order < 1 || lm_order > 5) bad("lm_order must be in [1, 5]");
  if (min_count < 1) bad("min_count must be >= 1");
  if (beam_width < 1) bad("beam_width must be >= 1");
  if (min_support < 0) bad("min_support must be >= 0");
  try {
    vad().validate();
    validity.validate();
  } catch (const Error &e) {
    throw Error(Errc::kConfigError, e.what());
  }
}

std::vector<std::string> PipelineConfig::echo() const {
  std::vector<std::string> out;
  auto add = [&](const std::string &k, const std::string &v) {
    out.push_back(k + ": " + v);
  };
  add("version", "\"" + version + "\"");
  add("rate", std::to_string(rate));
  add("frame_ms", std::to_string(frame_ms));
  add("frames_per_chunk", std::to_string(frames_per_chunk));
  add("silence_dbfs", fmt_double(silence_dbfs));
  add("vad_level", std::to_string(vad_level));
  add("voice_threshold", fmt_double(vad().voice_threshold));
  add("min_voice_ratio", fmt_double(validity.min_voice_ratio));
  add("max_voice_ratio", fmt_double(validity.max_voice_ratio));
  add("min_silence_ratio", fmt_double(validity.min_silence_ratio));
  add("max_silence_ratio", fmt_double(validity.max_silence_ratio));
  add("max_other_ratio", fmt_double(validity.max_other_ratio));
  add("min_span_ms", std::to_string(min_span_ms));
  add("span_ms", std::to_string(span_ms));
  add("lm_order", std::to_string(lm_order));
  add("min_count", std::to_string(min_count));
  add("alpha", fmt_double(alpha));
  add("beta", fmt_double(beta));
  add("beam_width", std::to_string(beam_width));
  add("prune_log10", prune_log10 ? fmt_double(*prune_log10) : "null");
  add("min_support", std::to_string(min_support));
  return out;
}

std::string PipelineConfig::echo_yaml() const {
  std::string s;
  for (const auto &l : echo()) s += l + "\n";
  return s;
}

PipelineConfig load_config(std::istream &in) {
  YAML::Node root;
  try {
    root = YAML::Load(in);
  } catch (const YAML::Exception &e) {
    throw Error(Errc::kConfigError, e.what(), e.mark.line + 1);
  }
  if (!root.IsMap()) throw Error(Errc::kConfigError, "config must be a mapping");
  if (!root["version"])
    throw Error(Errc::kConfigError, "config is missing 'version'");

  PipelineConfig c;
  for (const auto &kv : root) {
    const auto key = kv.first.as<std::string>();
    const YAML::Node &v = kv.second;
    if (key == "version") c.version = scalar<std::string>(v, key);
    else if (key == "rate") c.rate = scalar<int>(v, key);
    else if (key == "frame_ms") c.frame_ms = scalar<int>(v, key);
    else if (key == "frames_per_chunk") c.frames_per_chunk = scalar<int>(v, key);
    else if (key == "silence_dbfs") c.silence_dbfs = scalar<double>(v, key);
    else if (key == "vad_level") c.vad_level = scalar<int>(v, key);
    else if (key == "voice_threshold") c.voice_threshold = scalar<double>(v, key);
    else if (key == "min_voice_ratio") c.validity.min_voice_ratio = scalar<double>(v, key);
    else if (key == "max_voice_ratio") c.validity.max_voice_ratio = scalar<double>(v, key);
    else if (key == "min_silence_ratio") c.validity.min_silence_ratio = scalar<double>(v, key);
    else if (key == "max_silence_ratio") c.validity.max_silence_ratio = scalar<double>(v, key);
    else if (key == "max_other_ratio") c.validity.max_other_ratio = scalar<double>(v, key);
    else if (key == "min_span_ms") c.min_span_ms = scalar<std::int64_t>(v, key);
    else if (key == "span_ms") c.span_ms = scalar<std::int64_t>(v, key);
    else if (key == "lm_order") c.lm_order = scalar<int>(v, key);
    else if (key == "min_count") c.min_count = scalar<int>(v, key);
    else if (key == "alpha") c.alpha = scalar<double>(v, key);
    else if (key == "beta") c.beta = scalar<double>(v, key);
    else if (key == "beam_width") c.beam_width = scalar<int>(v, key);
    else if (key == "prune_log10") {
      if (v.IsNull()) c.prune_log10.reset();
      else c.prune_log10 = scalar<double>(v, key);
    }
    else if (key == "min_support") c.min_support = scalar<std::int64_t>(v, key);
    else
      throw Error(Errc::kConfigError, "unknown config key '" + key + "'",
                  kv.first.Mark().line + 1);
  }
  c.validate();
  return c;
}

PipelineConfig load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open config " + path);
  return load_config(in);
}

}  // namespace cforge
