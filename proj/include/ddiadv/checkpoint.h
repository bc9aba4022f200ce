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

#ifndef DDIADV_CHECKPOINT_H_
#define DDIADV_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "ddiadv/kgstore.h"
#include "ddiadv/scorers.h"

namespace ddiadv {

inline constexpr uint32_t kCheckpointLayoutVersion = 1;

// Binary layout, all integers and floats little-endian:
//   char[8]  magic "DDIADVCK"
//   u32      layout version
//   u32      scorer tag
//   u32      distance norm (1 = L1, 2 = L2)
//   u32      reserved (0)
//   u64      num entities, num relations, dim
//   f64[]    entity table, row-major
//   f64[]    relation table, row-major
std::string EncodeCheckpoint(const EmbeddingModel& model);
EmbeddingModel DecodeCheckpoint(const std::string& bytes,
                                const std::string& source = "<bytes>");

struct CheckpointMeta {
  uint64_t seed = 0;
  std::string config_hash;
};

// Writes `path` and the text sidecar `path.manifest` atomically.
void WriteCheckpoint(const std::string& path, const EmbeddingModel& model,
                     const CheckpointMeta& meta);
EmbeddingModel ReadCheckpoint(const std::string& path);

// FNV-1a 64-bit, rendered as 16 hex digits.
std::string HashHex(const std::string& text);

// name,d0,d1,... with one row per entity (or relation).
std::string EmbeddingCsv(const DenseMatrix& table,
                         const std::vector<std::string>& names);
// Inverse of EmbeddingCsv; values round-trip exactly.
DenseMatrix ParseEmbeddingCsv(const std::string& csv,
                              std::vector<std::string>* names = nullptr);

}  // namespace ddiadv

#endif  // DDIADV_CHECKPOINT_H_
