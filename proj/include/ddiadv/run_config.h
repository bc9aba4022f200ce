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

#ifndef DDIADV_RUN_CONFIG_H_
#define DDIADV_RUN_CONFIG_H_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ddiadv/advtrain.h"
#include "ddiadv/kgstore.h"

namespace ddiadv {

// Declarative run description. Text format, one `key = value` per line,
// '#' starts a comment. A `preset` supplies defaults; every other key
// overrides it. Unknown keys and malformed values raise ConfigError.
struct RunConfig {
  TrainConfig train;
  std::string preset;
  std::string data;        // TSV of triplets
  bool has_header = false;
  std::string out_dir;
  SplitRatios ratios;
  bool split_by_pair = false;
  size_t checkpoint_every = 0;  // 0: only the final checkpoint
  size_t workers = 1;

  // Canonical text listing every key; written next to run outputs.
  std::string Resolved() const;
  std::string Hash() const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues ParseKeyValues(const std::string& text, const std::string& source);

// Later entries win; `overrides` are applied after the file.
RunConfig ResolveRunConfig(const KeyValues& file, const KeyValues& overrides);

RunConfig LoadRunConfig(const std::string& path, const KeyValues& overrides);

}  // namespace ddiadv

#endif  // DDIADV_RUN_CONFIG_H_
