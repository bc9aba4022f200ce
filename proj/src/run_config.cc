/*
 * Copyright 2026 The ddiadv Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ddiadv/run_config.h"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "ddiadv/checkpoint.h"
#include "ddiadv/error.h"

namespace ddiadv {
namespace {

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': expected a number, got '" +
                      v + "'");
  }
  return out;
}

uint64_t ToUnsigned(const std::string& key, const std::string& v) {
  uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key +
                      "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" +
                    v + "'");
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using Setter = std::function<void(RunConfig&, const std::string&,
                                  const std::string&)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> kSetters = {
      {"data", [](RunConfig& c, auto&, auto& v) { c.data = v; }},
      {"has_header",
       [](RunConfig& c, auto& k, auto& v) { c.has_header = ToBool(k, v); }},
      {"out_dir", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
      {"scorer",
       [](RunConfig& c, auto& k, auto& v) {
         auto tag = ParseScorerTag(v);
         if (!tag) throw ConfigError("config key '" + k + "': unknown scorer '" + v + "'");
         c.train.scorer = *tag;
       }},
      {"sampler",
       [](RunConfig& c, auto& k, auto& v) {
         auto tag = ParseSamplerTag(v);
         if (!tag) throw ConfigError("config key '" + k + "': unknown sampler '" + v + "'");
         c.train.sampler = *tag;
       }},
      {"transe_norm",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "l1") {
           c.train.transe_norm = DistanceNorm::kL1;
         } else if (v == "l2") {
           c.train.transe_norm = DistanceNorm::kL2;
         } else {
           throw ConfigError("config key '" + k + "': expected l1 or l2");
         }
       }},
      {"clip_scope",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "embeddings") {
           c.train.clip_scope = ClipScope::kEmbeddings;
         } else if (v == "none") {
           c.train.clip_scope = ClipScope::kNone;
         } else {
           throw ConfigError("config key '" + k + "': expected embeddings or none");
         }
       }},
      {"dim", [](RunConfig& c, auto& k, auto& v) { c.train.dim = ToUnsigned(k, v); }},
      {"batch_size",
       [](RunConfig& c, auto& k, auto& v) { c.train.batch_size = ToUnsigned(k, v); }},
      {"n_dis", [](RunConfig& c, auto& k, auto& v) { c.train.n_dis = ToUnsigned(k, v); }},
      {"epochs",
       [](RunConfig& c, auto& k, auto& v) { c.train.epochs = ToUnsigned(k, v); }},
      {"alpha", [](RunConfig& c, auto& k, auto& v) { c.train.alpha = ToDouble(k, v); }},
      {"beta", [](RunConfig& c, auto& k, auto& v) { c.train.beta = ToDouble(k, v); }},
      {"clip", [](RunConfig& c, auto& k, auto& v) { c.train.clip = ToDouble(k, v); }},
      {"tau", [](RunConfig& c, auto& k, auto& v) { c.train.tau = ToDouble(k, v); }},
      {"gamma", [](RunConfig& c, auto& k, auto& v) { c.train.gamma = ToDouble(k, v); }},
      {"adv_temperature",
       [](RunConfig& c, auto& k, auto& v) { c.train.adv_temperature = ToDouble(k, v); }},
      {"negatives",
       [](RunConfig& c, auto& k, auto& v) { c.train.negatives = ToUnsigned(k, v); }},
      {"filters",
       [](RunConfig& c, auto& k, auto& v) { c.train.filters = ToUnsigned(k, v); }},
      {"kernel_rows",
       [](RunConfig& c, auto& k, auto& v) { c.train.kernel_rows = ToUnsigned(k, v); }},
      {"kernel_cols",
       [](RunConfig& c, auto& k, auto& v) { c.train.kernel_cols = ToUnsigned(k, v); }},
      {"decoder_hidden",
       [](RunConfig& c, auto& k, auto& v) { c.train.decoder_hidden = ToUnsigned(k, v); }},
      {"seed", [](RunConfig& c, auto& k, auto& v) { c.train.seed = ToUnsigned(k, v); }},
      {"split_train",
       [](RunConfig& c, auto& k, auto& v) { c.ratios.train = ToDouble(k, v); }},
      {"split_valid",
       [](RunConfig& c, auto& k, auto& v) { c.ratios.valid = ToDouble(k, v); }},
      {"split_test",
       [](RunConfig& c, auto& k, auto& v) { c.ratios.test = ToDouble(k, v); }},
      {"split_by_pair",
       [](RunConfig& c, auto& k, auto& v) { c.split_by_pair = ToBool(k, v); }},
      {"checkpoint_every",
       [](RunConfig& c, auto& k, auto& v) { c.checkpoint_every = ToUnsigned(k, v); }},
      {"workers",
       [](RunConfig& c, auto& k, auto& v) { c.workers = ToUnsigned(k, v); }},
  };
  return kSetters;
}

}  // namespace

KeyValues ParseKeyValues(const std::string& text, const std::string& source) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    out.emplace_back(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  return out;
}

RunConfig ResolveRunConfig(const KeyValues& file, const KeyValues& overrides) {
  std::map<std::string, std::string> merged;
  std::vector<std::string> order;
  for (const auto* kv : {&file, &overrides}) {
    for (const auto& [k, v] : *kv) {
      if (k != "preset" && Setters().count(k) == 0) {
        throw ConfigError("unknown config key '" + k + "'");
      }
      if (merged.count(k) == 0) order.push_back(k);
      merged[k] = v;
    }
  }
  RunConfig config;
  if (auto it = merged.find("preset");
      it != merged.end() && !it->second.empty()) {
    auto preset = FindPreset(it->second);
    if (!preset) throw ConfigError("unknown preset '" + it->second + "'");
    config.train = *preset;
    config.preset = it->second;
  }
  for (const auto& k : order) {
    if (k == "preset") continue;
    Setters().at(k)(config, k, merged.at(k));
  }
  config.train.Validate();
  if (config.workers == 0) throw ConfigError("workers must be >= 1");
  return config;
}

RunConfig LoadRunConfig(const std::string& path, const KeyValues& overrides) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return ResolveRunConfig(ParseKeyValues(text, path), overrides);
}

std::string RunConfig::Resolved() const {
  const TrainConfig& t = train;
  std::ostringstream out;
  out << "preset = " << preset << "\n"
      << "data = " << data << "\n"
      << "has_header = " << (has_header ? "true" : "false") << "\n"
      << "out_dir = " << out_dir << "\n"
      << "scorer = " << ScorerName(t.scorer) << "\n"
      << "sampler = " << SamplerName(t.sampler) << "\n"
      << "transe_norm = " << (t.transe_norm == DistanceNorm::kL1 ? "l1" : "l2")
      << "\n"
      << "clip_scope = "
      << (t.clip_scope == ClipScope::kEmbeddings ? "embeddings" : "none")
      << "\n"
      << "dim = " << t.dim << "\n"
      << "batch_size = " << t.batch_size << "\n"
      << "n_dis = " << t.n_dis << "\n"
      << "epochs = " << t.epochs << "\n"
      << "alpha = " << Num(t.alpha) << "\n"
      << "beta = " << Num(t.beta) << "\n"
      << "clip = " << Num(t.clip) << "\n"
      << "tau = " << Num(t.tau) << "\n"
      << "gamma = " << Num(t.gamma) << "\n"
      << "adv_temperature = " << Num(t.adv_temperature) << "\n"
      << "negatives = " << t.negatives << "\n"
      << "filters = " << t.filters << "\n"
      << "kernel_rows = " << t.kernel_rows << "\n"
      << "kernel_cols = " << t.kernel_cols << "\n"
      << "decoder_hidden = " << t.decoder_hidden << "\n"
      << "seed = " << t.seed << "\n"
      << "split_train = " << Num(ratios.train) << "\n"
      << "split_valid = " << Num(ratios.valid) << "\n"
      << "split_test = " << Num(ratios.test) << "\n"
      << "split_by_pair = " << (split_by_pair ? "true" : "false") << "\n"
      << "checkpoint_every = " << checkpoint_every << "\n"
      << "workers = " << workers << "\n";
  return out.str();
}

std::string RunConfig::Hash() const {
  // out_dir and workers do not change results.
  RunConfig copy = *this;
  copy.out_dir.clear();
  copy.workers = 1;
  return HashHex(copy.Resolved());
}

}  // namespace ddiadv
