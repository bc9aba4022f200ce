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

#ifndef DDIADV_ERROR_H_
#define DDIADV_ERROR_H_

#include <stdexcept>
#include <string>

namespace ddiadv {

enum class ErrorKind {
  kShape,
  kDomain,
  kParse,
  kData,
  kLookup,
  kConfig,
  kIo,
  kTraining,
  kEvaluation,
  kOracle,
  kSampler,
};

// Base of every error raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define DDIADV_DEFINE_ERROR(Name, Kind)                   \
  class Name : public Error {                             \
   public:                                                \
    explicit Name(const std::string& message)             \
        : Error(ErrorKind::Kind, message) {}              \
  };

DDIADV_DEFINE_ERROR(ShapeError, kShape)
DDIADV_DEFINE_ERROR(DomainError, kDomain)
DDIADV_DEFINE_ERROR(ParseError, kParse)
DDIADV_DEFINE_ERROR(DataError, kData)
DDIADV_DEFINE_ERROR(LookupError, kLookup)
DDIADV_DEFINE_ERROR(ConfigError, kConfig)
DDIADV_DEFINE_ERROR(IoError, kIo)
DDIADV_DEFINE_ERROR(TrainingError, kTraining)
DDIADV_DEFINE_ERROR(EvaluationError, kEvaluation)
DDIADV_DEFINE_ERROR(OracleError, kOracle)
DDIADV_DEFINE_ERROR(SamplerError, kSampler)

#undef DDIADV_DEFINE_ERROR

}  // namespace ddiadv

#endif  // DDIADV_ERROR_H_
