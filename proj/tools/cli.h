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

#ifndef DDIADV_TOOLS_CLI_H_
#define DDIADV_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "ddiadv/error.h"

namespace ddiadv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitInternal = 1;

int ExitCodeFor(ErrorKind kind);

// Entry point of the `ddiadv` binary. Safe to call repeatedly in-process.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);
int RunCli(int argc, char** argv);

}  // namespace ddiadv

#endif  // DDIADV_TOOLS_CLI_H_
