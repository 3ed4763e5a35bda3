/*
 * Copyright 2026 The deepforest Authors.
 *
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

#ifndef DEEPFOREST_TOOLS_CLI_COMMANDS_H_
#define DEEPFOREST_TOOLS_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

namespace deepforest::cli {

// Entry point of the gcforest tool. args excludes the program name.
// Results go to out, diagnostics and progress to err. Returns the process
// exit code: 0 on success, 1 on a runtime error, 2 on a usage error, 3 when
// `verify` finds mismatching probe rows.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace deepforest::cli

#endif  // DEEPFOREST_TOOLS_CLI_COMMANDS_H_
