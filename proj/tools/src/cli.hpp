/*
 * Copyright 2026 The abisim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace abisim::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    /// Any error; stderr carries one JSON line {"error": kind, "message": ...}.
    kError = 1,
    /// A checked result disagreed: oracle mismatch in bench/sweep, or a
    /// calibration band outside its range.
    kMismatch = 2,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Reports go to `out` unless --out names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace abisim::cli
