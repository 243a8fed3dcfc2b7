// Copyright 2026 The rbcorr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef RBCORR_TOOLS_COMMANDS_H
#define RBCORR_TOOLS_COMMANDS_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace rbcorr::cli {

struct CommandOptions {
    std::string config;
    std::string out;
    std::string data;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

void cmd_simulate(const CommandOptions& opts);
void cmd_fit(const CommandOptions& opts);
void cmd_blindness(const CommandOptions& opts);
void cmd_worstcase(const CommandOptions& opts);

/// Parses argv, runs the selected subcommand and returns the exit code.
/// Failures are reported on err as a single-line JSON error record.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rbcorr::cli

#endif  // RBCORR_TOOLS_COMMANDS_H
