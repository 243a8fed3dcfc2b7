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


#ifndef RBCORR_TOOLS_CONFIG_IO_H
#define RBCORR_TOOLS_CONFIG_IO_H

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"
#include "rbcorr/noise.h"
#include "rbcorr/numerics.h"
#include "rbcorr/rb.h"

namespace rbcorr::cli {

using Json = nlohmann::json;

/// Raised for schema violations in a config document.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when a file cannot be read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

void require_object(const Json& j, const std::string& where);
void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);
const Json& require_key(const Json& j, const char* key, const std::string& where);

double get_double(const Json& j, const std::string& where);
std::size_t get_size(const Json& j, const std::string& where);
std::uint64_t get_seed(const Json& j, const std::string& where);
bool get_bool(const Json& j, const std::string& where);
std::vector<double> get_double_list(const Json& j, const std::string& where);

/// Named operator ("I", "X", "Y", "Z", "H", "S", "P0", "P1", "+", "-"),
/// a real nested list, or {"re": [[...]], "im": [[...]]}.
ComplexMatrix parse_matrix(const Json& j, const std::string& where);

/// {"type": "identity" | "depolarizing" | "pauli" | "bit_flip" | "rotation"
///  | "unitary" | "kraus" | "choi", ...}. Instrument elements may add "weight".
Channel parse_channel(const Json& j, const std::string& where, bool allow_weight = false);

NoiseModel parse_noise(const Json& j, const std::string& where);
HamiltonianCoupled parse_hamiltonian(const Json& j, const std::string& where);
Spam parse_spam(const Json& j, const std::string& where);

/// Either a list of lengths or {"start", "stop", "step"} (inclusive).
std::vector<std::size_t> parse_lengths(const Json& j, const std::string& where);

/// Either a list or {"start", "stop", "points"} (inclusive, evenly spaced).
std::vector<double> parse_grid(const Json& j, const std::string& where);

}  // namespace rbcorr::cli

#endif  // RBCORR_TOOLS_CONFIG_IO_H
