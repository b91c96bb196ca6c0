// Copyright 2026 The GridAudit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The gridaudit command line, callable in-process for tests.

#ifndef GRIDAUDIT_TOOLS_CLI_HPP_
#define GRIDAUDIT_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace gridaudit::cli {

// Substituted for the wall clock under --fixed-timestamp.
inline constexpr const char* kFixedTimestamp = "2000-01-01T00:00:00Z";

enum ExitCode : int { kOk = 0, kFindings = 1, kUsage = 2 };

// `args` excludes the program name. Always returns 0, 1 or 2.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridaudit::cli

#endif  // GRIDAUDIT_TOOLS_CLI_HPP_
